//! Truncated Puiseux series over a finite field of characteristic p.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::{q, Val, Q};
use crate::resfield::{FFElement, GaloisField};

/// Truncation order used for parsed series without an explicit `O(...)` term.
pub const DEFAULT_TRUNC: i64 = 3;

/// A series `Σ c_k w^{n_k / D} + O(w^{T / D})` over `F_{p^m}`.
///
/// Exponents are stored as numerators over a common denominator `D`, kept in
/// lowest terms. A missing truncation means the series is exact.
#[derive(Clone)]
pub struct PuiseuxSeries {
    field: GaloisField,
    denom: i64,
    /// `(numerator, coefficient code)`, strictly increasing, nonzero codes.
    terms: Vec<(i64, u32)>,
    trunc: Option<i64>,
}

impl PuiseuxSeries {
    /// Exact zero.
    pub fn zero(field: &GaloisField) -> Self {
        PuiseuxSeries { field: field.clone(), denom: 1, terms: Vec::new(), trunc: None }
    }

    /// Zero known only modulo `w^t`.
    pub fn zero_mod(field: &GaloisField, t: Q) -> Self {
        PuiseuxSeries {
            field: field.clone(),
            denom: *t.denom(),
            terms: Vec::new(),
            trunc: Some(*t.numer()),
        }
        .normalized()
    }

    pub fn one(field: &GaloisField) -> Self {
        Self::monomial(&field.one(), q(0, 1))
    }

    /// Exact single term `c w^e`.
    pub fn monomial(c: &FFElement, e: Q) -> Self {
        PuiseuxSeries {
            field: c.field().clone(),
            denom: *e.denom(),
            terms: vec![(*e.numer(), c.code())],
            trunc: None,
        }
        .normalized()
    }

    pub fn constant(c: &FFElement) -> Self {
        Self::monomial(c, q(0, 1))
    }

    /// The distinguished element of valuation 1 with leading coefficient 1.
    pub fn varpi(field: &GaloisField) -> Self {
        Self::monomial(&field.one(), q(1, 1))
    }

    /// Builds a series from `(exponent, coefficient)` pairs and a truncation.
    pub fn from_terms(field: &GaloisField, terms: &[(Q, FFElement)], trunc: Option<Q>) -> Result<Self> {
        let mut denom = trunc.map_or(1, |t| *t.denom());
        for (e, c) in terms {
            if c.field() != field {
                return Err(Error::ParentMismatch);
            }
            denom = denom.lcm(e.denom());
        }
        let scale = |x: &Q| x.numer() * (denom / x.denom());
        let mut acc: BTreeMap<i64, u32> = BTreeMap::new();
        for (e, c) in terms {
            let slot = acc.entry(scale(e)).or_insert(0);
            *slot = field.add(*slot, c.code());
        }
        Ok(PuiseuxSeries {
            field: field.clone(),
            denom,
            terms: acc.into_iter().collect(),
            trunc: trunc.map(|t| scale(&t)),
        }
        .normalized())
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Common denominator of all exponents and the truncation.
    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn terms(&self) -> Vec<(Q, FFElement)> {
        self.terms
            .iter()
            .map(|&(n, c)| (q(n, self.denom), self.field.element(c)))
            .collect()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Truncation order; `None` for an exact series.
    pub fn trunc(&self) -> Option<Q> {
        self.trunc.map(|t| q(t, self.denom))
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// True when no term survives below the truncation.
    pub fn is_zero_to_precision(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term `(exponent, coefficient)`, if any term is known.
    pub fn leading(&self) -> Option<(Q, FFElement)> {
        self.terms.first().map(|&(n, c)| (q(n, self.denom), self.field.element(c)))
    }

    /// Valuation: the leading exponent, `+inf` for the exact zero.
    pub fn ord(&self) -> Result<Val> {
        match (self.terms.first(), self.trunc) {
            (Some(&(n, _)), _) => Ok(Val::Finite(q(n, self.denom))),
            (None, None) => Ok(Val::PosInf),
            (None, Some(t)) => Err(Error::TruncationLoss(format!(
                "series vanishes below w^({}); valuation unknown",
                fmt_exp(q(t, self.denom))
            ))),
        }
    }

    /// Valuation of a series known to be nonzero.
    pub fn valuation(&self) -> Result<Q> {
        match self.ord()? {
            Val::Finite(v) => Ok(v),
            _ => Err(Error::TruncationLoss("series is exactly zero".into())),
        }
    }

    /// Certified lower bound on the valuation; `None` for the exact zero.
    pub fn ord_lower_bound(&self) -> Option<Q> {
        self.terms
            .first()
            .map(|&(n, _)| n)
            .or(self.trunc)
            .map(|n| q(n, self.denom))
    }

    /// Forgets every term at or beyond `w^t`.
    pub fn truncated(&self, t: Q) -> Self {
        let d = self.denom.lcm(t.denom());
        let mut out = self.rescaled(d);
        let tn = t.numer() * (d / t.denom());
        out.trunc = Some(out.trunc.map_or(tn, |x| x.min(tn)));
        out.normalized()
    }

    fn rescaled(&self, d: i64) -> Self {
        debug_assert_eq!(d % self.denom, 0);
        let k = d / self.denom;
        PuiseuxSeries {
            field: self.field.clone(),
            denom: d,
            terms: self.terms.iter().map(|&(n, c)| (n * k, c)).collect(),
            trunc: self.trunc.map(|t| t * k),
        }
    }

    /// Drops terms at or beyond the truncation and reduces the denominator.
    fn normalized(mut self) -> Self {
        self.terms.retain(|&(_, c)| c != 0);
        if let Some(t) = self.trunc {
            self.terms.retain(|&(n, _)| n < t);
        }
        let mut g = self.denom;
        for &(n, _) in &self.terms {
            g = g.gcd(&n);
        }
        if let Some(t) = self.trunc {
            g = g.gcd(&t);
        }
        if g > 1 {
            self.denom /= g;
            for term in &mut self.terms {
                term.0 /= g;
            }
            if let Some(t) = self.trunc.as_mut() {
                *t /= g;
            }
        }
        self
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let d = self.denom.lcm(&other.denom);
        (self.rescaled(d), other.rescaled(d))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let (a, b) = self.aligned(other);
        let trunc = match (a.trunc, b.trunc) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        let f = &self.field;
        let mut acc: BTreeMap<i64, u32> = a.terms.iter().copied().collect();
        for &(n, c) in &b.terms {
            let slot = acc.entry(n).or_insert(0);
            *slot = f.add(*slot, c);
        }
        Ok(PuiseuxSeries { field: f.clone(), denom: a.denom, terms: acc.into_iter().collect(), trunc }
            .normalized())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        PuiseuxSeries {
            terms: self.terms.iter().map(|&(n, c)| (n, f.neg(c))).collect(),
            ..self.clone()
        }
    }

    /// Product; known modulo `w^{min(T_x + ord y, T_y + ord x)}`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let f = &self.field;
        let (a, b) = self.aligned(other);
        let (Some(la), Some(lb)) = (a.lower_bound_num(), b.lower_bound_num()) else {
            return Ok(PuiseuxSeries::zero(f));
        };
        let trunc = [a.trunc.map(|t| t + lb), b.trunc.map(|t| t + la)]
            .into_iter()
            .flatten()
            .min();
        let mut acc: BTreeMap<i64, u32> = BTreeMap::new();
        for &(n1, c1) in &a.terms {
            for &(n2, c2) in &b.terms {
                let n = n1 + n2;
                if trunc.is_some_and(|t| n >= t) {
                    break;
                }
                let slot = acc.entry(n).or_insert(0);
                *slot = f.add(*slot, f.mul(c1, c2));
            }
        }
        Ok(PuiseuxSeries { field: f.clone(), denom: a.denom, terms: acc.into_iter().collect(), trunc }
            .normalized())
    }

    fn lower_bound_num(&self) -> Option<i64> {
        self.terms.first().map(|&(n, _)| n).or(self.trunc)
    }

    /// Multiplies by the exact monomial `c w^e`.
    pub fn scale(&self, c: &FFElement, e: Q) -> Self {
        if c.is_zero() {
            return PuiseuxSeries::zero(&self.field);
        }
        let d = self.denom.lcm(e.denom());
        let mut out = self.rescaled(d);
        let shift = e.numer() * (d / e.denom());
        let f = &self.field;
        for term in &mut out.terms {
            term.0 += shift;
            term.1 = f.mul(term.1, c.code());
        }
        if let Some(t) = out.trunc.as_mut() {
            *t += shift;
        }
        out.normalized()
    }

    /// Multiplicative inverse. An exact series with more than one term is
    /// inverted to relative precision [`DEFAULT_TRUNC`].
    pub fn inv(&self) -> Result<Self> {
        let Some((a, c)) = self.leading() else {
            return Err(Error::DivisionByUncertifiedZero);
        };
        let cinv = c.inv().expect("leading coefficient is nonzero");
        if self.terms.len() == 1 && self.trunc.is_none() {
            return Ok(Self::monomial(&cinv, -a));
        }
        let rel = match self.trunc() {
            Some(t) => t - a,
            None => q(DEFAULT_TRUNC, 1),
        };
        // u = x / (c w^a) = 1 + (higher terms), known modulo w^rel
        let u = self.scale(&cinv, -a).truncated(rel);
        let one = Self::one(&self.field);
        let mut z = one.clone();
        for _ in 0..64 {
            let err = one.try_sub(&u.try_mul(&z)?)?;
            if err.is_zero_to_precision() {
                return Ok(z.truncated(rel).scale(&cinv, -a));
            }
            z = z.try_add(&z.try_mul(&err)?)?;
        }
        Err(Error::NoConvergence(64))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inv()?)
    }

    /// `x^p`: exponents times p, coefficients raised to the p-th power; a
    /// truncation `T` becomes `pT`.
    pub fn frobenius(&self) -> Self {
        let p = self.field.p() as i64;
        let f = &self.field;
        PuiseuxSeries {
            field: f.clone(),
            denom: self.denom,
            terms: self.terms.iter().map(|&(n, c)| (n * p, f.frob(c, 1))).collect(),
            trunc: self.trunc.map(|t| t * p),
        }
        .normalized()
    }

    /// The unique p-th root: exponents divided by p, coefficients by `σ^{-1}`.
    pub fn pth_root(&self) -> Self {
        let p = self.field.p() as i64;
        let f = &self.field;
        PuiseuxSeries {
            field: f.clone(),
            denom: self.denom * p,
            terms: self.terms.iter().map(|&(n, c)| (n, f.frob(c, -1))).collect(),
            trunc: self.trunc,
        }
        .normalized()
    }

    /// Integer power; factors of p in the exponent use the exact Frobenius.
    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        if n == 0 {
            return Ok(Self::one(&self.field));
        }
        let p = self.field.p() as i64;
        let mut base = self.clone();
        let mut n = n;
        while n % p == 0 {
            base = base.frobenius();
            n /= p;
        }
        let mut result: Option<Self> = None;
        loop {
            if n & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.try_mul(&base)?,
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = base.try_mul(&base)?;
        }
        Ok(result.expect("positive exponent"))
    }

    /// An `n`-th root for `n` prime to p. The leading coefficient's root is the
    /// one of smallest code in the coefficient field.
    pub fn nth_root(&self, n: u64) -> Result<Self> {
        let p = self.field.p() as u64;
        if n == 0 || n % p == 0 {
            return Err(Error::Precondition(format!("root index {n} must be prime to p = {p}")));
        }
        let Some((a, c)) = self.leading() else {
            return Err(Error::TruncationLoss("cannot take a root of an unknown series".into()));
        };
        let f = &self.field;
        let Some(root) = f.nth_root(c.code(), n) else {
            return Err(Error::RootNotInField { needed_degree: f.root_extension_degree(c.code(), n) });
        };
        let root = f.element(root);
        let n = n as i64;
        let lead_exp = a / n;
        if self.terms.len() == 1 && self.trunc.is_none() {
            return Ok(Self::monomial(&root, lead_exp));
        }
        let rel = match self.trunc() {
            Some(t) => t - a,
            None => q(DEFAULT_TRUNC, 1),
        };
        let cinv = c.inv().expect("nonzero");
        let u = self.scale(&cinv, -a).truncated(rel);
        let n_inv = f.element(f.inv(f.from_int(n)).expect("n is a unit mod p"));
        // Newton iteration z ← z − (z^n − u) / (n z^{n−1}) starting at z = 1
        let mut z = Self::one(f);
        for _ in 0..64 {
            let res = z.pow(n)?.try_sub(&u)?;
            if res.is_zero_to_precision() {
                return Ok(z.truncated(rel).scale(&root, lead_exp));
            }
            let step = res.try_mul(&z.pow(n - 1)?.inv()?)?.scale(&n_inv, q(0, 1));
            z = z.try_sub(&step)?;
        }
        Err(Error::NoConvergence(64))
    }

    /// Agreement up to the smaller of the two truncations.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.try_sub(other).is_ok_and(|d| d.is_zero_to_precision())
    }

    /// Parses `c1*w^(e1) + c2*w^(e2) + O(w^(T))` over `field`. A series with
    /// no `O(...)` term is truncated at [`DEFAULT_TRUNC`].
    pub fn parse(field: &GaloisField, s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::parse("empty series"));
        }
        let mut terms = Vec::new();
        let mut trunc = None;
        for (negative, term) in split_signed_terms(&s)? {
            if let Some(inner) = term.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
                if negative || trunc.is_some() {
                    return Err(Error::parse(format!("misplaced O-term in {s:?}")));
                }
                let e = parse_w_power(inner)?;
                trunc = Some(e);
                continue;
            }
            let (coef, exp) = match term.find('w') {
                None => (term, q(0, 1)),
                Some(pos) => {
                    let head = &term[..pos];
                    let coef = match head.strip_suffix('*') {
                        Some(c) => c,
                        None if head.is_empty() => "1",
                        None => return Err(Error::parse(format!("missing '*' before w in {term:?}"))),
                    };
                    (coef, parse_w_power(&term[pos..])?)
                }
            };
            let coef = coef
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .unwrap_or(coef);
            let mut c = field.parse_element(coef)?;
            if negative {
                c = -c;
            }
            terms.push((exp, c));
        }
        let trunc = trunc.unwrap_or(q(DEFAULT_TRUNC, 1));
        Self::from_terms(field, &terms, Some(trunc))
    }
}

fn split_signed_terms(s: &str) -> Result<Vec<(bool, &str)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut negative = false;
    let mut i = 0;
    if let Some(&b) = bytes.first() {
        if b == b'+' || b == b'-' {
            negative = b == b'-';
            start = 1;
            i = 1;
        }
    }
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::parse(format!("unbalanced parentheses in {s:?}")));
                }
            }
            b'+' | b'-' if depth == 0 => {
                let prev = bytes[i - 1];
                // a sign right after '^' belongs to an exponent like w^-1
                if prev != b'^' {
                    if start == i {
                        return Err(Error::parse(format!("empty term in {s:?}")));
                    }
                    out.push((negative, &s[start..i]));
                    negative = bytes[i] == b'-';
                    start = i + 1;
                }
            }
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err(Error::parse(format!("unbalanced parentheses in {s:?}")));
    }
    if start >= bytes.len() {
        return Err(Error::parse(format!("dangling sign in {s:?}")));
    }
    out.push((negative, &s[start..]));
    Ok(out)
}

/// Parses `w`, `w^k`, `w^(a/b)`, `w^a/b` into the exponent.
fn parse_w_power(s: &str) -> Result<Q> {
    let rest = s
        .strip_prefix('w')
        .ok_or_else(|| Error::parse(format!("expected a power of w, got {s:?}")))?;
    if rest.is_empty() {
        return Ok(q(1, 1));
    }
    let e = rest
        .strip_prefix('^')
        .ok_or_else(|| Error::parse(format!("expected '^' in {s:?}")))?;
    let e = e
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(e);
    crate::rational::parse_q(e)
}

fn fmt_exp(e: Q) -> String {
    if *e.denom() == 1 {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in self.terms() {
            let cs = c.to_string();
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            parts.push(if e == q(0, 1) {
                cs
            } else if c.is_one() {
                format!("w^({})", fmt_exp(e))
            } else {
                format!("{cs}*w^({})", fmt_exp(e))
            });
        }
        if let Some(t) = self.trunc() {
            parts.push(format!("O(w^({}))", fmt_exp(t)));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for PuiseuxSeries {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
}

macro_rules! series_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&PuiseuxSeries> for &PuiseuxSeries {
            type Output = PuiseuxSeries;
            /// Panics if the operands have different coefficient fields.
            fn $method(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
                self.$checked(rhs).expect("series over different fields")
            }
        }
        impl std::ops::$tr for PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

series_binop!(Add, add, try_add);
series_binop!(Sub, sub, try_sub);
series_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        PuiseuxSeries::neg(self)
    }
}

/// Free-function form of [`PuiseuxSeries::pth_root`].
pub fn pth_root(x: &PuiseuxSeries) -> PuiseuxSeries {
    x.pth_root()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resfield::ff_make;

    fn f9() -> GaloisField {
        ff_make(3, 2, 0).unwrap()
    }

    #[test]
    fn varpi_basics() {
        let f = f9();
        let w = PuiseuxSeries::varpi(&f);
        assert_eq!(w.ord().unwrap(), Val::Finite(q(1, 1)));
        let w6 = PuiseuxSeries::monomial(&f.one(), q(1, 6));
        assert_eq!(w6.pow(6).unwrap(), w);
        let x = PuiseuxSeries::one(&f) + w.clone();
        let prod = x.inv().unwrap() * x;
        assert_eq!(prod, PuiseuxSeries::one(&f));
        assert_eq!(prod.trunc(), Some(q(3, 1)));
    }

    #[test]
    fn pth_roots() {
        let f = f9();
        let w = PuiseuxSeries::varpi(&f);
        assert_eq!(w.pow(3).unwrap().pth_root(), w);
        let g = f.generator();
        let c = PuiseuxSeries::constant(&g);
        assert_eq!(c.pth_root().leading().unwrap().1, g.frobenius(-1));
        let t = PuiseuxSeries::parse(&f, "g*w^(1/3) + w^(1/2) + O(w^(2))").unwrap();
        let u = PuiseuxSeries::parse(&f, "1 + 2*w^(1/4) + O(w^(2))").unwrap();
        let tu = t.pow(3).unwrap() * u.pow(3).unwrap();
        assert_eq!(tu.pth_root(), t * u);
    }

    #[test]
    fn nth_root_round_trip() {
        let f = f9();
        let x = PuiseuxSeries::parse(&f, "w^(1/3) + g*w^(1/2) + 2*w^(1) + O(w^(3))").unwrap();
        let r = x.nth_root(8).unwrap();
        assert_eq!(r.valuation().unwrap(), q(1, 24));
        assert_eq!(r.pow(8).unwrap(), x);
        let bad = PuiseuxSeries::parse(&f, "g*w^(1) + O(w^(3))").unwrap();
        assert!(matches!(bad.nth_root(8), Err(Error::RootNotInField { needed_degree: 16 })));
    }

    #[test]
    fn truncation_propagates() {
        let f = f9();
        let x = PuiseuxSeries::parse(&f, "w^(1/2) + O(w^(2))").unwrap();
        let y = PuiseuxSeries::parse(&f, "w^(1/4) + O(w^(1))").unwrap();
        assert_eq!((&x * &y).trunc(), Some(q(3, 2)));
        assert_eq!((&x + &y).trunc(), Some(q(1, 1)));
        assert_eq!(x.frobenius().trunc(), Some(q(6, 1)));
        let z = PuiseuxSeries::zero_mod(&f, q(1, 1));
        assert!(matches!(z.ord(), Err(Error::TruncationLoss(_))));
        assert_eq!(z.inv().unwrap_err(), Error::DivisionByUncertifiedZero);
        assert_eq!(PuiseuxSeries::zero(&f).ord().unwrap(), Val::PosInf);
    }

    #[test]
    fn text_round_trip() {
        let f = f9();
        for s in [
            "w^(1/6) + O(w^(3))",
            "(2*g+1)*w^(1/2) + 2*w^(7/4) + O(w^(5/2))",
            "g + O(w^(1))",
            "O(w^(3))",
        ] {
            let x = PuiseuxSeries::parse(&f, s).unwrap();
            assert_eq!(x.to_string(), s);
        }
        let x = PuiseuxSeries::parse(&f, "w - w^(2)").unwrap();
        assert_eq!(x.to_string(), "w^(1) + 2*w^(2) + O(w^(3))");
        assert!(PuiseuxSeries::parse(&f, "").is_err());
        assert!(PuiseuxSeries::parse(&f, "2w").is_err());
        assert!(PuiseuxSeries::parse(&f, "w^(1/0)").is_err());
        assert!(PuiseuxSeries::parse(&f, "(w").is_err());
    }
}
