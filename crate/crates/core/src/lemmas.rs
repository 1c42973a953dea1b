//! Self-contained numerical checks of the cyclotomic and valuation lemmas.
//!
//! The sharp-map statement `ϖ♯/p ↦ −1` is checked on the untilted side in
//! its equivalent form `ord(x_ℓ^{p^ℓ} + p) > 1`, with
//! `x_ℓ = (ζ_{p^ℓ} − 1)/(ζ_{p^{ℓ+1}} − 1)`, at finitely many levels `ℓ`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::localfield::{make_field, LocalElement, TowerKind};
use crate::rational::{fmt_q, q, Val, Q};
use crate::resfield::ff_make;
use crate::tilt::{case1_residuals, solve_a_relations, solve_b_system, PuiseuxSeries};

/// Largest cyclotomic degree `(p−1)p^ℓ` the sharp-reduction check accepts.
pub const MAX_CYCLOTOMIC_DEGREE: u64 = 300;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Outcome of one verification suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub assertions: Vec<Assertion>,
}

impl Report {
    pub fn new(check: &str, params: Value) -> Self {
        Report { check: check.to_string(), params, assertions: Vec::new() }
    }

    pub fn assert(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion { name: name.into(), ok, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.ok)
    }

    pub fn failures(&self) -> usize {
        self.assertions.iter().filter(|a| !a.ok).count()
    }
}

/// `ord(x)` when certified, otherwise the certified lower bound, rendered as
/// text.
fn describe_ord(x: &LocalElement) -> (Q, String) {
    match x.ord() {
        Ok(Val::Finite(v)) => (v, format!("ord = {}", fmt_q(&v))),
        _ => {
            let lb = x.ord_lower_bound();
            (lb, format!("ord >= {}", fmt_q(&lb)))
        }
    }
}

/// Wilson-unit identity in `Q_p(ζ_p)`: each `u_i = (1 − ζ^i)/(1 − ζ)` is a
/// unit, `u_1 ⋯ u_{p−1} ≡ −1`, and `(1 − ζ)^{p−1}/p ≡ −1` modulo the maximal
/// ideal.
pub fn check_wilson_units(p: u64, n: u32) -> Result<Report> {
    let mut report = Report::new("wilson", json!({ "p": p, "N": n }));
    if p == 2 {
        report.assert("product_is_minus_one", true, "empty product; 1 = -1 in F_2");
        return Ok(report);
    }
    let f = make_field(p, 1, TowerKind::Cyclotomic { level: 0 }, n)?;
    let k = f.residue_field();
    let minus_one = k.element(k.from_int(-1));
    let zeta = f.one().try_add(&f.uniformizer())?;
    let one_minus_zeta = f.one().try_sub(&zeta)?;
    let mut product = f.one();
    for i in 1..p as i64 {
        let u = f.one().try_sub(&zeta.pow(i)?)?.try_div(&one_minus_zeta)?;
        let (_, detail) = describe_ord(&u);
        report.assert(format!("u_{i}_is_unit"), u.ord() == Ok(Val::Finite(q(0, 1))), detail);
        product = product.try_mul(&u)?;
    }
    let res = product.residue_of_unit()?;
    report.assert("product_is_minus_one", res == minus_one, format!("residue = {res}"));
    let ratio = one_minus_zeta.pow(p as i64 - 1)?.try_div(&f.from_int(p as i64))?;
    let r = ratio.residue_of_unit()?;
    report.assert("uniformizer_power_over_p_is_minus_one", r == minus_one, format!("residue = {r}"));
    Ok(report)
}

/// Default working precision for the sharp-reduction check.
pub fn default_sharp_precision(p: u64, level: u32) -> u32 {
    if p == 3 && level >= 2 {
        8
    } else {
        6
    }
}

/// In `Q_p(ζ_{p^{ℓ+1}})`: `x_ℓ^{p^ℓ} ≡ (ζ_{p^{ℓ+1}} − 1)^{(p−1)p^ℓ}` modulo
/// `p^{ℓ−1}`, and `ord(x_ℓ^{p^ℓ} + p) > 1`.
pub fn check_sharp_reduction(p: u64, level: u32, n: u32) -> Result<Report> {
    if level == 0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let degree = (p - 1).checked_mul(p.checked_pow(level).unwrap_or(u64::MAX)).unwrap_or(u64::MAX);
    if degree > MAX_CYCLOTOMIC_DEGREE {
        return Err(Error::Precondition(format!(
            "cyclotomic degree {degree} exceeds {MAX_CYCLOTOMIC_DEGREE}"
        )));
    }
    let mut report = Report::new("sharp", json!({ "p": p, "l": level, "N": n }));
    let f = make_field(p, 1, TowerKind::Cyclotomic { level }, n)?;
    let pi = f.uniformizer();
    let zeta = f.one().try_add(&pi)?;
    let x = zeta.pow(p as i64)?.try_sub(&f.one())?.try_div(&pi)?;
    let pl = p.pow(level) as i64;
    let y = x.pow(pl)?;
    let diff = y.try_sub(&pi.pow((p as i64 - 1) * pl)?)?;
    let (v, detail) = describe_ord(&diff);
    report.assert("congruence_mod_p^(l-1)", v >= Q::from(i64::from(level) - 1), detail);
    let shifted = y.try_add(&f.from_int(p as i64))?;
    let (v, detail) = describe_ord(&shifted);
    report.assert("x^(p^l)/p_reduces_to_minus_one", v > Q::from(1), detail);
    Ok(report)
}

/// The equal-valuation corner at `p = 2`: `ord(t0) = ord(t1) = 1/4`.
///
/// Solves the `b`- and `a`-relations in the Puiseux model over `F_4`, checks
/// the valuations, walks the case split on `a0^2 = a1 t1^2 + b1` and
/// `a1^2 = a0 t0^2 + b0`, and derives `ord(τ0) = ord(τ1) = 1/2` from
/// `ord(HT_i(λ)) = 1/2`, `ord(HT_i(Πλ)) ≥ 1`, and `τ0 τ1 = p`.
pub fn check_p2_corner() -> Result<Report> {
    let k = ff_make(2, 2, 0)?;
    let mut report = Report::new("p2corner", json!({ "p": 2, "m": 2 }));
    let t0 = PuiseuxSeries::monomial(&k.one(), q(1, 4));
    // leading coefficients are cubes, so b0 = (t0^4 t1^2)^{1/3} stays over F_4
    let t1 = PuiseuxSeries::monomial(&k.one(), q(1, 4))
        .try_add(&PuiseuxSeries::monomial(&k.generator(), q(1, 2)))?;
    let (b0, b1) = solve_b_system(&t0, &t1)?;
    let (a0, a1) = solve_a_relations(&t0, &t1, &b1)?;
    let residuals = case1_residuals(&t0, &t1, &a0, &a1, &b0, &b1)?;
    let bounds: Vec<String> = residuals
        .iter()
        .map(|r| r.ord_lower_bound().map_or("exact zero".into(), |b| format!(">= {}", fmt_q(&b))))
        .collect();
    report.assert(
        "relations_hold",
        residuals.iter().all(PuiseuxSeries::is_zero_to_precision),
        bounds.join(", "),
    );
    let half = q(1, 2);
    let quarter = q(1, 4);
    let mut ords = Vec::new();
    for (name, x, want) in [("b0", &b0, half), ("b1", &b1, half), ("a0", &a0, quarter), ("a1", &a1, quarter)] {
        let v = x.valuation()?;
        report.assert(format!("ord_{name}"), v == want, format!("ord = {}", fmt_q(&v)));
        ords.push(v);
    }
    let (oa0, oa1) = (ords[2], ords[3]);
    let zero = q(0, 1);
    // case split of a0^2 = a1 t1^2 + b1 and its mirror
    let first = oa0 == quarter || (oa1 == zero && oa0 >= quarter);
    let second = oa1 == quarter || (oa0 == zero && oa1 >= quarter);
    report.assert("case_split_first_relation", first, format!("ord(a0) = {}, ord(a1) = {}", fmt_q(&oa0), fmt_q(&oa1)));
    report.assert("case_split_second_relation", second, "mirror of the first relation");
    report.assert(
        "case_split_forces_quarter",
        oa0 == quarter && oa1 == quarter,
        "both unit alternatives contradict each other",
    );
    // ord HT_0(λ) = ord(a1^p), ord HT_1(λ) = ord(a0^p); the Πλ images b0^p, b1^p
    // vanish modulo ϖ, so their periods have ord ≥ 1
    let ht0 = Q::from(2) * oa1;
    let ht1 = Q::from(2) * oa0;
    let hp0 = Q::from(2) * ords[0];
    let hp1 = Q::from(2) * ords[1];
    report.assert("ord_HT0_lambda", ht0 == half, format!("ord = {}", fmt_q(&ht0)));
    report.assert("ord_HT0_pi_lambda_at_least_one", hp0 >= Q::from(1), format!("ord(b0^2) = {}", fmt_q(&hp0)));
    report.assert("ord_HT1_pi_lambda_at_least_one", hp1 >= Q::from(1), format!("ord(b1^2) = {}", fmt_q(&hp1)));
    // ord τi = ord HT_i(Πλ) − ord HT_i(λ) ≥ 1 − ord HT_i(λ); the two lower
    // bounds summing to ord(τ0 τ1) = 1 pins both down
    let lb0 = Q::from(1) - ht0;
    let lb1 = Q::from(1) - ht1;
    let forced = lb0 + lb1 == Q::from(1);
    for (name, lb) in [("ord_tau0", lb0), ("ord_tau1", lb1)] {
        report.assert(
            name,
            forced && lb == half,
            format!("ord >= {}, bounds sum to {}", fmt_q(&lb), fmt_q(&(lb0 + lb1))),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson() {
        for p in [2, 3, 5, 7] {
            let r = check_wilson_units(p, 6).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn sharp() {
        for (p, l) in [(3, 1), (3, 2), (5, 1), (7, 1)] {
            let r = check_sharp_reduction(p, l, default_sharp_precision(p, l)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(matches!(check_sharp_reduction(7, 3, 6), Err(Error::Precondition(_))));
    }

    #[test]
    fn corner() {
        let r = check_p2_corner().unwrap();
        assert!(r.passed(), "{r:#?}");
        assert_eq!(r, check_p2_corner().unwrap());
    }
}
