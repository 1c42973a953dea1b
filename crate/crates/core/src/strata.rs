//! Classification of points of the period domain into Ekedahl-Oort strata.

use serde::Serialize;

use crate::dieudonne::{delta_iso_exists, presentation, DieudonneModP, SearchMode, StratumPresentation};
use crate::error::{Error, Result};
use crate::localfield::{LocalElement, LocalField};
use crate::rational::{q, Val, Q};
use crate::resfield::FFElement;

/// A point of `C ∪ {∞}`, with `ord(∞) = −∞`.
#[derive(Clone, Debug)]
pub enum TauPoint {
    Infinity(LocalField),
    Finite(LocalElement),
}

impl TauPoint {
    pub fn field(&self) -> &LocalField {
        match self {
            TauPoint::Infinity(f) => f,
            TauPoint::Finite(x) => x.parent(),
        }
    }

    pub fn ord(&self) -> Result<Val> {
        match self {
            TauPoint::Infinity(_) => Ok(Val::NegInf),
            TauPoint::Finite(x) => x.ord(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, TauPoint::Infinity(_))
    }

    pub fn as_finite(&self) -> Option<&LocalElement> {
        match self {
            TauPoint::Finite(x) => Some(x),
            TauPoint::Infinity(_) => None,
        }
    }
}

impl From<LocalElement> for TauPoint {
    fn from(x: LocalElement) -> Self {
        TauPoint::Finite(x)
    }
}

/// `(τ0, τ1) = (τ, p/τ)`, with `p/0 = ∞` and `p/∞ = 0`.
pub fn hodge_tate_periods(tau: &TauPoint) -> Result<(TauPoint, TauPoint)> {
    let field = tau.field();
    let p = field.from_int(field.p() as i64);
    match tau {
        TauPoint::Infinity(f) => Ok((tau.clone(), TauPoint::Finite(f.zero()))),
        TauPoint::Finite(x) => match x.ord()? {
            Val::PosInf => Ok((tau.clone(), TauPoint::Infinity(field.clone()))),
            _ => Ok((tau.clone(), TauPoint::Finite(p.try_div(x)?))),
        },
    }
}

/// Coefficients over `(λ, Πλ)` of the spanning vectors of the plane `W_τ`,
/// one pair per graded component: `(τ, −1)` and `(p, −τ)`.
pub fn period_plane(tau: &TauPoint) -> [[LocalElement; 2]; 2] {
    let f = tau.field();
    match tau {
        TauPoint::Infinity(_) => [[f.one(), f.zero()], [f.zero(), -f.one()]],
        TauPoint::Finite(x) => [[x.clone(), -f.one()], [f.from_int(f.p() as i64), -x]],
    }
}

/// Which graded pieces of the reduction's differentials Π kills.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PiOmegaFlags {
    pub pi_omega_zero: bool,
    pub pi_omega0_nonzero: bool,
    pub pi_omega1_nonzero: bool,
}

#[derive(Clone, Debug)]
pub struct StratumReport {
    pub label: StratumPresentation,
    pub ord_tau: Val,
    pub ord_tau0: Val,
    pub ord_tau1: Val,
    pub module: DieudonneModP,
    pub flags: PiOmegaFlags,
}

impl StratumReport {
    pub fn u(&self) -> Option<&FFElement> {
        self.label.u()
    }

    pub fn is_superspecial(&self) -> bool {
        self.label.is_superspecial()
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    label: &'static str,
    ord_tau: String,
    ord_tau0: String,
    ord_tau1: String,
    u: Option<String>,
    superspecial: bool,
    pi_omega_flags: PiOmegaFlags,
    module: &'a DieudonneModP,
}

impl Serialize for StratumReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            label: self.label.name(),
            ord_tau: self.ord_tau.to_string(),
            ord_tau0: self.ord_tau0.to_string(),
            ord_tau1: self.ord_tau1.to_string(),
            u: self.u().map(|u| u.to_string()),
            superspecial: self.is_superspecial(),
            pi_omega_flags: self.flags,
            module: &self.module,
        }
        .serialize(s)
    }
}

/// The two thresholds `1/(p+1)` and `p/(p+1)`.
pub fn thresholds(p: u64) -> (Q, Q) {
    let p = p as i64;
    (q(1, p + 1), q(p, p + 1))
}

/// Region of the extended ord-line a valuation falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    Lower,
    LowerBoundary,
    Middle,
    UpperBoundary,
    Upper,
}

impl Region {
    pub fn of(p: u64, ord: Val) -> Region {
        let (lo, hi) = thresholds(p);
        let (lo, hi) = (Val::Finite(lo), Val::Finite(hi));
        if ord < lo {
            Region::Lower
        } else if ord == lo {
            Region::LowerBoundary
        } else if ord < hi {
            Region::Middle
        } else if ord == hi {
            Region::UpperBoundary
        } else {
            Region::Upper
        }
    }

    /// Stratum name, with the family parameter left abstract.
    pub fn label_name(self) -> &'static str {
        match self {
            Region::Lower => "LowerSS",
            Region::LowerBoundary => "LowerFamily",
            Region::Middle => "MiddleSS",
            Region::UpperBoundary => "UpperFamily",
            Region::Upper => "UpperSS",
        }
    }

    fn flags(self) -> PiOmegaFlags {
        let (zero, o0, o1) = match self {
            Region::Middle => (true, false, false),
            Region::Lower | Region::LowerBoundary => (false, false, true),
            Region::Upper | Region::UpperBoundary => (false, true, false),
        };
        PiOmegaFlags { pi_omega_zero: zero, pi_omega0_nonzero: o0, pi_omega1_nonzero: o1 }
    }
}

/// `1 − ord` on the extended line.
fn complement(v: Val) -> Val {
    match v {
        Val::Finite(x) => Val::Finite(Q::from(1) - x),
        other => other.neg(),
    }
}

/// Residue of `p/τ^{p+1}` on the lower boundary and of `τ^{p+1}/p^p` on the
/// upper boundary: the unsigned fiber invariant.
pub fn eo_invariant(tau: &TauPoint) -> Result<FFElement> {
    let ord = tau.ord()?;
    let region = Region::of(tau.field().p(), ord);
    let x = match (region, tau) {
        (Region::LowerBoundary | Region::UpperBoundary, TauPoint::Finite(x)) => x,
        _ => return Err(Error::NotOnBoundary(ord)),
    };
    let f = x.parent();
    let p = f.p() as i64;
    let tp1 = x.pow(p + 1)?;
    let ratio = if region == Region::LowerBoundary {
        f.from_int(p).try_div(&tp1)?
    } else {
        tp1.try_div(&f.from_int(p).pow(p)?)?
    };
    ratio.residue_of_unit()
}

/// Stratum label, periods, flags, and the attached mod-p Dieudonné module.
pub fn classify(tau: &TauPoint) -> Result<StratumReport> {
    let field = tau.field();
    let ord = tau.ord()?;
    let region = Region::of(field.p(), ord);
    let label = match region {
        Region::Lower => StratumPresentation::LowerSS,
        Region::Middle => StratumPresentation::MiddleSS,
        Region::Upper => StratumPresentation::UpperSS,
        Region::LowerBoundary => StratumPresentation::LowerFamily(-eo_invariant(tau)?),
        Region::UpperBoundary => StratumPresentation::UpperFamily(-eo_invariant(tau)?),
    };
    let module = presentation(&label, field.residue_field())?;
    Ok(StratumReport {
        label,
        ord_tau: ord,
        ord_tau0: ord,
        ord_tau1: complement(ord),
        module,
        flags: region.flags(),
    })
}

/// Same label and, on the boundary, the same family parameter.
pub fn same_stratum(tau1: &TauPoint, tau2: &TauPoint) -> Result<bool> {
    let (a, b) = (classify(tau1)?, classify(tau2)?);
    Ok(a.label == b.label)
}

/// Whether the modules attached to two points are Δ-isomorphic, by exhaustive
/// search when the residue field is small and by the structured search
/// otherwise.
pub fn modules_isomorphic(a: &StratumReport, b: &StratumReport) -> Result<bool> {
    let exhaustive = SearchMode::exhaustive();
    let found = match delta_iso_exists(&a.module, &b.module, exhaustive) {
        Err(Error::BudgetExceeded { .. }) => {
            delta_iso_exists(&a.module, &b.module, SearchMode::StructuredForm)?
        }
        other => other?,
    };
    Ok(found.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{make_field, TowerKind};

    fn field(p: u64, e: u32) -> LocalField {
        make_field(p, 2, TowerKind::EisensteinRootOfP { e }, 8).unwrap()
    }

    #[test]
    fn periods_multiply_to_p() {
        let f = field(3, 4);
        let tau = TauPoint::Finite(f.uniformizer());
        let (t0, t1) = hodge_tate_periods(&tau).unwrap();
        assert_eq!(t0.ord().unwrap(), Val::Finite(q(1, 4)));
        assert_eq!(t1.ord().unwrap(), Val::Finite(q(3, 4)));
        let prod = t0.as_finite().unwrap() * t1.as_finite().unwrap();
        assert_eq!(prod, f.from_int(3));
        let (i0, i1) = hodge_tate_periods(&TauPoint::Infinity(f.clone())).unwrap();
        assert!(i0.is_infinity());
        assert_eq!(i1.ord().unwrap(), Val::PosInf);
    }

    #[test]
    fn plane_coefficients() {
        let f = field(3, 4);
        let [c0, c1] = period_plane(&TauPoint::Finite(f.zero()));
        assert_eq!(c0, [f.zero(), f.from_int(-1)]);
        assert_eq!(c1, [f.from_int(3), f.zero()]);
        let [i0, i1] = period_plane(&TauPoint::Infinity(f.clone()));
        assert_eq!(i0, [f.one(), f.zero()]);
        assert_eq!(i1, [f.zero(), f.from_int(-1)]);
    }

    #[test]
    fn labels() {
        let f = field(3, 4);
        let k = f.residue_field();
        let c = |t: TauPoint| classify(&t).unwrap();
        assert_eq!(c(TauPoint::Finite(f.pi_pow(2))).label, StratumPresentation::MiddleSS);
        assert_eq!(c(TauPoint::Infinity(f.clone())).label, StratumPresentation::LowerSS);
        assert_eq!(c(TauPoint::Finite(f.zero())).label, StratumPresentation::UpperSS);
        let r = c(TauPoint::Finite(f.uniformizer()));
        assert_eq!(r.label, StratumPresentation::LowerFamily(k.element(k.from_int(-1))));
        assert_eq!(r.ord_tau1, Val::Finite(q(3, 4)));
        assert!(!r.is_superspecial() && !r.module.is_superspecial_v2());
        let up = c(TauPoint::Finite(f.pi_pow(3)));
        assert_eq!(up.label, StratumPresentation::UpperFamily(k.element(k.from_int(-1))));
    }

    #[test]
    fn teichmuller_scaled_boundary_point() {
        let f = field(3, 4);
        let k = f.residue_field();
        for cc in k.units() {
            let tau = TauPoint::Finite(f.teichmuller(&cc).unwrap() * f.uniformizer());
            assert_eq!(eo_invariant(&tau).unwrap(), cc.pow(-4));
            let r = classify(&tau).unwrap();
            assert_eq!(r.u(), Some(&-cc.pow(-4)));
        }
        let g = k.generator();
        let a = TauPoint::Finite(f.uniformizer());
        let b = TauPoint::Finite(f.teichmuller(&g).unwrap() * f.uniformizer());
        assert!(!same_stratum(&a, &b).unwrap());
        assert!(same_stratum(&a, &a).unwrap());
    }

    #[test]
    fn off_boundary_invariant() {
        let f = field(3, 4);
        assert_eq!(
            eo_invariant(&TauPoint::Finite(f.pi_pow(2))).unwrap_err(),
            Error::NotOnBoundary(Val::Finite(q(1, 2)))
        );
    }
}
