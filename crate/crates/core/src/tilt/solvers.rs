//! Solvers for the σ-twisted coefficient relations of the two normal forms.
//!
//! Case 1 (both partial periods of positive valuation):
//!
//! ```text
//! a0^p = a1 t1^p + b1     a1^p = a0 t0^p + b0
//! b0^p = b1 t0^p          b1^p = b0 t1^p
//! ```
//!
//! Case 2 (one partial period normalized to 1):
//!
//! ```text
//! a0^p = a1 t^p + b1 s^p  a1^p = a0
//! b0^p = b1               b1^p = b0 t^p
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{fmt_q, q, Q};
use crate::resfield::{FFElement, GaloisField};

use super::series::{PuiseuxSeries, DEFAULT_TRUNC};

const MAX_STEPS: usize = 10_000;

/// Solves `X^{p^k} − A X = B` term by term.
///
/// Each step cancels the leading term `r w^ρ` of the residual, whose update
/// `δ^{p^k} − A δ` is additive in the correction `δ`. With `v = ord(A)/(p^k−1)`
/// (the valuation of the nonzero roots of `X^{p^k} − A X`):
///
/// * `ρ < p^k v`: the power term dominates, `δ = (−r)^{1/p^k} w^{ρ/p^k}`;
/// * `ρ > p^k v`: the linear term dominates, `δ = (r / lc(A)) w^{ρ − ord A}`;
/// * `ρ = p^k v`: `δ = c w^v` with `c^{p^k} − lc(A) c + r = 0` in the
///   coefficient field (smallest code wins).
///
/// Corrections of the first kind accumulate below `v` without reaching it,
/// so a root whose leading term lies below `v` is returned truncated strictly
/// below `v`.
pub fn solve_additive(a: &PuiseuxSeries, b: &PuiseuxSeries, k: u32) -> Result<PuiseuxSeries> {
    let f = a.field().clone();
    if b.field() != &f {
        return Err(Error::ParentMismatch);
    }
    let p = f.p() as i64;
    let big_p = p.pow(k);
    let (ord_a, lead_a) = a
        .leading()
        .ok_or_else(|| Error::Precondition("linear coefficient must be nonzero".into()))?;
    let kernel_val = ord_a / (big_p - 1);
    let edge = kernel_val * big_p;
    let bound = |rho: Q| if rho < edge { rho / big_p } else { rho - ord_a };

    let mut residual = b.neg();
    let mut x = PuiseuxSeries::zero(&f);
    let mut cap: Option<Q> = None;
    match residual.leading() {
        Some((rho, _)) => {
            let d0 = bound(rho);
            if d0 < kernel_val {
                cap = Some(kernel_val - (kernel_val - d0) / big_p);
            }
        }
        None if residual.is_exact() => return Ok(x),
        None => {}
    }
    let default_limit = residual
        .leading()
        .map(|(rho, _)| bound(rho) + q(DEFAULT_TRUNC, 1));
    let limit_of = |r: &PuiseuxSeries| -> Q {
        [cap, r.trunc().map(bound), default_limit]
            .into_iter()
            .flatten()
            .min()
            .expect("at least one bound is finite")
    };
    for _ in 0..MAX_STEPS {
        let limit = limit_of(&residual);
        let Some((rho, r)) = residual.leading() else {
            return Ok(x.truncated(limit));
        };
        if bound(rho) >= limit {
            return Ok(x.truncated(limit));
        }
        let (c, d) = if rho < edge {
            ((-&r).frobenius(-(k as i64)), rho / big_p)
        } else if rho > edge {
            (&r * &lead_a.inv().expect("nonzero"), rho - ord_a)
        } else {
            (edge_root(&f, big_p, &lead_a, &r)?, kernel_val)
        };
        let delta = PuiseuxSeries::monomial(&c, d);
        let delta_pow = PuiseuxSeries::monomial(&c.pow(big_p), d * big_p);
        residual = residual.try_add(&delta_pow)?.try_sub(&a.scale(&c, d))?;
        x = x.try_add(&delta)?;
    }
    Err(Error::NoConvergence(MAX_STEPS))
}

/// Smallest-code root of `c^P − a c + r` in the coefficient field.
fn edge_root(f: &GaloisField, big_p: i64, a: &FFElement, r: &FFElement) -> Result<FFElement> {
    let eval = |c: &FFElement| &(&c.pow(big_p) - &(a * c)) + r;
    if let Some(c) = f.elements().find(|c| eval(c).is_zero()) {
        return Ok(c);
    }
    // report the smallest extension that contains a root
    for j in 2..=8u32 {
        let Ok(big) = GaloisField::new(f.p() as u64, f.m() * j, 0) else {
            break;
        };
        let emb = f.embedding_into(&big)?;
        let (a2, r2) = (emb.apply(a), emb.apply(r));
        if big.elements().any(|c| (&(&c.pow(big_p) - &(&a2 * &c)) + &r2).is_zero()) {
            return Err(Error::RootNotInField { needed_degree: f.m() * j });
        }
    }
    Err(Error::RootNotInField { needed_degree: 0 })
}

fn positive_valuation(x: &PuiseuxSeries, name: &str) -> Result<Q> {
    let v = x.valuation()?;
    if v <= q(0, 1) {
        return Err(Error::Precondition(format!("ord({name}) = {} must be positive", fmt_q(&v))));
    }
    Ok(v)
}

/// Solves `b0^p = b1 t0^p`, `b1^p = b0 t1^p` through `b0^{p²−1} = t0^{p²} t1^p`.
pub fn solve_b_system(t0: &PuiseuxSeries, t1: &PuiseuxSeries) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
    let p = t0.field().p() as i64;
    let o0 = positive_valuation(t0, "t0")?;
    let o1 = positive_valuation(t1, "t1")?;
    if o0 + o1 != q(1, p) {
        return Err(Error::Precondition(format!(
            "ord(t0) + ord(t1) = {} but must be 1/{p}",
            fmt_q(&(o0 + o1))
        )));
    }
    let b0 = t0.pow(p * p)?.try_mul(&t1.pow(p)?)?.nth_root((p * p - 1) as u64)?;
    let b1 = b0.try_div(t0)?.frobenius();
    Ok((b0, b1))
}

/// Which partial period carries the valuation hypothesis of the case-1 solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// `ord(t1) > 1/(p²(p−1))`.
    OnT1,
    /// `ord(t0) > 1/(p²(p−1))`.
    OnT0,
}

/// Solves for `(a0, a1)` given a solution `(b0, b1)` of the b-relations.
///
/// Eliminating `a0` gives `a1^{p²} − t1^p t0^{p²} a1 = b1 (t0^{p²} + t0^p)`,
/// solved by [`solve_additive`]; then `a0 = (a1 t1^p + b1)^{1/p}`.
pub fn solve_a_system(
    t0: &PuiseuxSeries,
    t1: &PuiseuxSeries,
    b0: &PuiseuxSeries,
    b1: &PuiseuxSeries,
    hypothesis: Hypothesis,
) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
    if hypothesis == Hypothesis::OnT0 {
        let (a1, a0) = solve_a_system(t1, t0, b1, b0, Hypothesis::OnT1)?;
        return Ok((a0, a1));
    }
    let p = t0.field().p() as i64;
    positive_valuation(t0, "t0")?;
    let o1 = positive_valuation(t1, "t1")?;
    let threshold = q(1, p * p * (p - 1));
    if o1 <= threshold {
        return Err(Error::HypothesisViolated(format!(
            "ord = {} is not above 1/{}",
            fmt_q(&o1),
            p * p * (p - 1)
        )));
    }
    solve_a_relations(t0, t1, b1)
}

/// Solves the `a`-relations given the `b`'s without checking any valuation
/// hypothesis: `a1` is a root of `X^{p²} − t1^p t0^{p²} X = b1 (t0^{p²} + t0^p)`
/// and `a0 = a1^{1/p} t1 + b1^{1/p}`.
pub fn solve_a_relations(
    t0: &PuiseuxSeries,
    t1: &PuiseuxSeries,
    b1: &PuiseuxSeries,
) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
    let p = t0.field().p() as i64;
    let t0pp = t0.pow(p * p)?;
    let lin = t1.pow(p)?.try_mul(&t0pp)?;
    let rhs = b1.try_mul(&t0pp.try_add(&t0.pow(p)?)?)?;
    let a1 = solve_additive(&lin, &rhs, 2)?;
    let a0 = a1.pth_root().try_mul(t1)?.try_add(&b1.pth_root())?;
    Ok((a0, a1))
}

/// Solves whichever hypothesis holds, preferring the one on `t1`.
pub fn solve_a_system_auto(
    t0: &PuiseuxSeries,
    t1: &PuiseuxSeries,
    b0: &PuiseuxSeries,
    b1: &PuiseuxSeries,
) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
    match solve_a_system(t0, t1, b0, b1, Hypothesis::OnT1) {
        Err(Error::HypothesisViolated(_)) => solve_a_system(t0, t1, b0, b1, Hypothesis::OnT0),
        other => other,
    }
}

/// Residuals of the four case-1 relations, in the order listed in the module
/// documentation.
pub fn case1_residuals(
    t0: &PuiseuxSeries,
    t1: &PuiseuxSeries,
    a0: &PuiseuxSeries,
    a1: &PuiseuxSeries,
    b0: &PuiseuxSeries,
    b1: &PuiseuxSeries,
) -> Result<[PuiseuxSeries; 4]> {
    let p = t0.field().p() as i64;
    let (t0p, t1p) = (t0.pow(p)?, t1.pow(p)?);
    Ok([
        a0.pow(p)?.try_sub(&a1.try_mul(&t1p)?.try_add(b1)?)?,
        a1.pow(p)?.try_sub(&a0.try_mul(&t0p)?.try_add(b0)?)?,
        b0.pow(p)?.try_sub(&b1.try_mul(&t0p)?)?,
        b1.pow(p)?.try_sub(&b0.try_mul(&t1p)?)?,
    ])
}

/// Output of [`solve_case2`].
#[derive(Clone, Debug)]
pub struct Case2Solution {
    pub a0: PuiseuxSeries,
    pub a1: PuiseuxSeries,
    pub b0: PuiseuxSeries,
    pub b1: PuiseuxSeries,
}

/// Solves the case-2 relations: `b0^{p²−1} = t^p`, `b1 = b0^p`, `a0` a root
/// of `X^{p²} − t^{p²} X − b1^p s^{p²}`, `a1 = a0^{1/p}`.
pub fn solve_case2(t: &PuiseuxSeries, s: &PuiseuxSeries) -> Result<Case2Solution> {
    let p = t.field().p() as i64;
    let ot = t.valuation()?;
    if ot != q(1, p) {
        return Err(Error::Precondition(format!("ord(t) = {} but must be 1/{p}", fmt_q(&ot))));
    }
    if let Some(lb) = s.ord_lower_bound() {
        if s.leading().is_some() && lb < q(0, 1) {
            return Err(Error::Precondition(format!("ord(s) = {} is negative", fmt_q(&lb))));
        }
    }
    let b0 = t.pow(p)?.nth_root((p * p - 1) as u64)?;
    let b1 = b0.frobenius();
    let lin = t.pow(p * p)?;
    let rhs = b1.frobenius().try_mul(&s.pow(p * p)?)?;
    let a0 = solve_additive(&lin, &rhs, 2)?;
    let a1 = a0.pth_root();
    Ok(Case2Solution { a0, a1, b0, b1 })
}

/// Residuals of the four case-2 relations, in the order listed in the module
/// documentation.
pub fn case2_residuals(t: &PuiseuxSeries, s: &PuiseuxSeries, sol: &Case2Solution) -> Result<[PuiseuxSeries; 4]> {
    let p = t.field().p() as i64;
    let tp = t.pow(p)?;
    let Case2Solution { a0, a1, b0, b1 } = sol;
    Ok([
        a0.pow(p)?.try_sub(&a1.try_mul(&tp)?.try_add(&b1.try_mul(&s.pow(p)?)?)?)?,
        a1.pow(p)?.try_sub(a0)?,
        b0.pow(p)?.try_sub(b1)?,
        b1.pow(p)?.try_sub(&b0.try_mul(&tp)?)?,
    ])
}

/// Reduction of a unit series: its constant coefficient.
pub fn residue_of_unit_series(x: &PuiseuxSeries) -> Result<FFElement> {
    let v = x.valuation()?;
    if v != q(0, 1) {
        return Err(Error::NotAUnit(fmt_q(&v)));
    }
    Ok(x.leading().expect("nonzero").1)
}

/// Residue congruence of the case-2 normal form.
#[derive(Clone, Debug, Serialize)]
pub struct Congruence {
    /// Reduction of `ϖ (a0/b1)^{p+1}`.
    pub unit1: FFElement,
    /// Reduction of `ϖ s^{p+1} / t^p`.
    pub unit2: FFElement,
    pub equal: bool,
}

/// Reduces `ϖ (a0/b1)^{p+1}` and `ϖ s^{p+1}/t^p` to the residue field. Both are
/// units exactly when `s` is a unit.
pub fn check_residue_congruence(
    a0: &PuiseuxSeries,
    b1: &PuiseuxSeries,
    s: &PuiseuxSeries,
    t: &PuiseuxSeries,
) -> Result<Congruence> {
    let f = t.field();
    let p = f.p() as i64;
    let os = s.valuation()?;
    if os != q(0, 1) {
        return Err(Error::NotAUnit(format!("ord(s) = {}", fmt_q(&os))));
    }
    let w = PuiseuxSeries::varpi(f);
    let unit1 = residue_of_unit_series(&w.try_mul(&a0.try_div(b1)?.pow(p + 1)?)?)?;
    let unit2 = residue_of_unit_series(&w.try_mul(&s.pow(p + 1)?)?.try_div(&t.pow(p)?)?)?;
    let equal = unit1 == unit2;
    Ok(Congruence { unit1, unit2, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resfield::ff_make;

    fn f9() -> GaloisField {
        ff_make(3, 2, 0).unwrap()
    }

    fn ser(f: &GaloisField, s: &str) -> PuiseuxSeries {
        PuiseuxSeries::parse(f, s).unwrap()
    }

    fn all_zero(rs: &[PuiseuxSeries]) -> bool {
        rs.iter().all(|r| r.is_zero_to_precision())
    }

    #[test]
    fn b_system_valuations() {
        let f = f9();
        let t = ser(&f, "w^(1/6) + O(w^(3))");
        let (b0, b1) = solve_b_system(&t, &t).unwrap();
        assert_eq!(b0.valuation().unwrap(), q(1, 4));
        assert_eq!(b1.valuation().unwrap(), q(1, 4));
        let t0 = ser(&f, "w^(1/12) + O(w^(3))");
        let t1 = ser(&f, "w^(1/4) + w^(1/2) + O(w^(3))");
        let (b0, b1) = solve_b_system(&t0, &t1).unwrap();
        assert_eq!(b0.valuation().unwrap(), q(3, 16));
        assert_eq!(b1.valuation().unwrap(), q(5, 16));
        assert!(b0.pow(3).unwrap().agrees_with(&(&b1 * &t0.pow(3).unwrap())));
        assert!(b1.pow(3).unwrap().agrees_with(&(&b0 * &t1.pow(3).unwrap())));
        let unit = ser(&f, "1 + w^(1/3) + O(w^(3))");
        assert!(matches!(solve_b_system(&unit, &t1), Err(Error::Precondition(_))));
    }

    #[test]
    fn a_system_valuations_and_residuals() {
        let f = f9();
        let t = ser(&f, "w^(1/6) + O(w^(3))");
        let (b0, b1) = solve_b_system(&t, &t).unwrap();
        let (a0, a1) = solve_a_system(&t, &t, &b0, &b1, Hypothesis::OnT1).unwrap();
        assert_eq!(a0.valuation().unwrap(), q(1, 12));
        assert_eq!(a1.valuation().unwrap(), q(1, 12));
        assert!(all_zero(&case1_residuals(&t, &t, &a0, &a1, &b0, &b1).unwrap()));

        let t0 = ser(&f, "w^(1/12) + O(w^(3))");
        let t1 = ser(&f, "w^(1/4) + O(w^(3))");
        let (b0, b1) = solve_b_system(&t0, &t1).unwrap();
        let (a0, a1) = solve_a_system(&t0, &t1, &b0, &b1, Hypothesis::OnT1).unwrap();
        assert_eq!(a0.valuation().unwrap(), q(5, 48));
        assert_eq!(a1.valuation().unwrap(), q(1, 8) - q(1, 16));
        assert!(all_zero(&case1_residuals(&t0, &t1, &a0, &a1, &b0, &b1).unwrap()));
    }

    #[test]
    fn a_system_boundary_rejected() {
        let f = f9();
        let t0 = ser(&f, "w^(5/18) + O(w^(3))");
        let t1 = ser(&f, "w^(1/18) + O(w^(3))");
        let (b0, b1) = solve_b_system(&t0, &t1).unwrap();
        assert!(matches!(
            solve_a_system(&t0, &t1, &b0, &b1, Hypothesis::OnT1),
            Err(Error::HypothesisViolated(_))
        ));
        let (a0, a1) = solve_a_system_auto(&t0, &t1, &b0, &b1).unwrap();
        assert!(all_zero(&case1_residuals(&t0, &t1, &a0, &a1, &b0, &b1).unwrap()));
    }

    #[test]
    fn case2_unit_s() {
        let f = f9();
        let t = ser(&f, "w^(1/3) + O(w^(3))");
        let s = ser(&f, "1 + O(w^(3))");
        let sol = solve_case2(&t, &s).unwrap();
        assert_eq!(sol.b0.valuation().unwrap(), q(1, 8));
        assert_eq!(sol.b1.valuation().unwrap(), q(3, 8));
        assert_eq!(sol.a0.valuation().unwrap(), q(1, 8));
        assert_eq!(sol.a1.valuation().unwrap(), q(1, 24));
        assert!(all_zero(&case2_residuals(&t, &s, &sol).unwrap()));
        let c = check_residue_congruence(&sol.a0, &sol.b1, &s, &t).unwrap();
        assert!(c.unit2.is_one());
        assert!(c.equal);
    }

    #[test]
    fn case2_superspecial() {
        let f = f9();
        let t = ser(&f, "w^(1/3) + O(w^(3))");
        let s = ser(&f, "w^(1/2) + O(w^(3))");
        let sol = solve_case2(&t, &s).unwrap();
        assert!(sol.a0.valuation().unwrap() > q(1, 8));
        assert!(all_zero(&case2_residuals(&t, &s, &sol).unwrap()));
        assert!(matches!(check_residue_congruence(&sol.a0, &sol.b1, &s, &t), Err(Error::NotAUnit(_))));
        let bad = ser(&f, "w^(1/2) + O(w^(3))");
        assert!(matches!(solve_case2(&bad, &s), Err(Error::Precondition(_))));
    }
}
