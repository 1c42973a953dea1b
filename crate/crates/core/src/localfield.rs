//! Finite extensions of the p-adic numbers with one unramified layer and one
//! totally ramified generator, carried to a fixed working precision.
//!
//! The integer ring is modeled as `W[π]/(E(π))` where `W = Z_p[x]/(f)` is the
//! unramified ring lifted from the residue field's defining polynomial `f`, and
//! `E` is Eisenstein: either `π^e − p` or `Φ_{p^{ℓ+1}}(π + 1)`. Everything is
//! computed modulo `p^S` with one guard digit beyond the working precision.
//!
//! A nonzero element is stored as `π^v · u` with `u` a unit and a relative
//! precision `r`: `u` is known modulo `π^r`. Elements that vanish to their
//! known precision are kept as an inexact zero with an absolute precision.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;


use crate::error::{Error, Result};
use crate::rational::{q, Val, Q};
use crate::resfield::{is_prime, FFElement, GaloisField};

/// Default working precision in p-adic digits.
pub const DEFAULT_PRECISION: u32 = 8;

/// Largest modulus `p^S` the coefficient arithmetic accepts.
const MODULUS_LIMIT: u128 = 1 << 62;

/// The ramified generator of a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TowerKind {
    /// `π^e = p`.
    EisensteinRootOfP { e: u32 },
    /// `π = ζ − 1` with `ζ` a primitive `p^{level+1}`-th root of unity.
    Cyclotomic { level: u32 },
}

#[derive(Debug)]
struct FieldInner {
    p: u64,
    m: u32,
    kind: TowerKind,
    e: usize,
    /// Working precision in p-adic digits.
    n: u32,
    /// Storage precision `n + 1`.
    s: u32,
    modulus: u64,
    residue: GaloisField,
    /// Low coefficients of the unramified modulus `f`.
    unram: Vec<u64>,
    /// Low coefficients `E_0..E_{e-1}` of the Eisenstein polynomial, reduced.
    eisenstein: Vec<u64>,
    /// `p / π` as a ring element.
    p_over_pi: Vec<u64>,
}

/// A local field descriptor together with its precomputed arithmetic data.
#[derive(Clone, Debug)]
pub struct LocalField(Arc<FieldInner>);

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.m == other.0.m
                && self.0.kind == other.0.kind
                && self.0.n == other.0.n)
    }
}

impl Eq for LocalField {}

/// Builds a local field; see [`LocalField::new`].
pub fn make_field(p: u64, m: u32, kind: TowerKind, n: u32) -> Result<LocalField> {
    LocalField::new(p, m, kind, n)
}

impl LocalField {
    pub fn new(p: u64, m: u32, kind: TowerKind, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if n < 2 {
            return Err(Error::Precondition("precision must be at least 2 digits".into()));
        }
        let s = n + 1;
        let limit = max_precision(p);
        let modulus = (p as u128).checked_pow(s).filter(|&x| x < MODULUS_LIMIT);
        let Some(modulus) = modulus else {
            return Err(Error::PrecisionTooLarge { p, requested: n, limit });
        };
        let modulus = modulus as u64;
        let residue = GaloisField::new(p, m, 0)?;
        let unram = residue.modulus().iter().map(|&c| c as u64).collect();
        let eisenstein = match kind {
            TowerKind::EisensteinRootOfP { e } => {
                if e == 0 {
                    return Err(Error::Precondition("ramification index must be positive".into()));
                }
                let mut v = vec![0u64; e as usize];
                v[0] = modulus - p;
                v
            }
            TowerKind::Cyclotomic { level } => cyclotomic_shifted(p, level, modulus)?,
        };
        let e = eisenstein.len();
        // E(π) = π^e + Σ E_j π^j with E_0 = ±p, so p/π = ∓(π^{e−1} + Σ_{j≥1} E_j π^{j−1}).
        let sign_positive = eisenstein[0] == p % modulus;
        let mut ppi = vec![0u64; e * m as usize];
        let mut set = |j: usize, c: u64| {
            ppi[j * m as usize] = if sign_positive { (modulus - c % modulus) % modulus } else { c };
        };
        set(e - 1, 1);
        for j in 1..e {
            set(j - 1, eisenstein[j]);
        }
        Ok(LocalField(Arc::new(FieldInner {
            p,
            m,
            kind,
            e,
            n,
            s,
            modulus,
            residue,
            unram,
            eisenstein,
            p_over_pi: ppi,
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn kind(&self) -> TowerKind {
        self.0.kind
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        self.0.e as u32
    }

    /// Working precision in p-adic digits.
    pub fn precision(&self) -> u32 {
        self.0.n
    }

    /// Absolute precision cap in π-adic digits.
    pub fn pi_precision(&self) -> i64 {
        self.0.e as i64 * self.0.n as i64
    }

    pub fn residue_field(&self) -> &GaloisField {
        &self.0.residue
    }

    /// Same tower at a different precision.
    pub fn with_precision(&self, n: u32) -> Result<LocalField> {
        LocalField::new(self.0.p, self.0.m, self.0.kind, n)
    }

    fn len(&self) -> usize {
        self.0.e * self.0.m as usize
    }

    // ---- element constructors ------------------------------------------

    /// The exact zero, known to the full working precision.
    pub fn zero(&self) -> LocalElement {
        LocalElement { parent: self.clone(), repr: Repr::Zero { abs: self.pi_precision() } }
    }

    pub fn one(&self) -> LocalElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> LocalElement {
        let md = self.0.modulus as i128;
        let c = (n as i128).rem_euclid(md) as u64;
        let mut body = vec![0u64; self.len()];
        body[0] = c;
        self.normalized(0, body, self.pi_precision())
    }

    /// The uniformizer `π`.
    pub fn uniformizer(&self) -> LocalElement {
        self.pi_pow(1)
    }

    /// `π^k` for any integer `k`.
    pub fn pi_pow(&self, k: i64) -> LocalElement {
        let mut body = vec![0u64; self.len()];
        body[0] = 1;
        LocalElement {
            parent: self.clone(),
            repr: Repr::Unit { v: k, body, rel: self.pi_precision() },
        }
    }

    /// Multiplicative lift of a residue-field element.
    pub fn teichmuller(&self, c: &FFElement) -> Result<LocalElement> {
        if c.field() != self.residue_field() {
            return Err(Error::ParentMismatch);
        }
        if c.is_zero() {
            return Ok(self.zero());
        }
        let mut w: Vec<u64> = c.coords().iter().map(|&x| x as u64).collect();
        let q = self.residue_field().order() as u64;
        for _ in 0..=self.0.s {
            let next = self.w_pow(&w, q);
            if next == w {
                break;
            }
            w = next;
        }
        let mut body = vec![0u64; self.len()];
        body[..self.0.m as usize].copy_from_slice(&w);
        Ok(LocalElement {
            parent: self.clone(),
            repr: Repr::Unit { v: 0, body, rel: self.pi_precision() },
        })
    }

    /// `Σ c_j π^j` with integer coefficients, exact to working precision.
    pub fn from_pi_coeffs(&self, coeffs: &[i64]) -> LocalElement {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .fold(self.zero(), |acc, (j, &c)| acc + self.from_int(c) * self.pi_pow(j as i64))
    }

    // ---- ring arithmetic on bodies --------------------------------------

    fn addmod(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0.modulus {
            s - self.0.modulus
        } else {
            s
        }
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0.modulus as u128) as u64
    }

    fn w_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.0.m as usize;
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = self.addmod(prod[i + j], self.mulmod(x, y));
            }
        }
        self.w_reduce(prod)
    }

    fn w_reduce(&self, mut prod: Vec<u64>) -> Vec<u64> {
        let m = self.0.m as usize;
        let md = self.0.modulus;
        for k in (m..prod.len()).rev() {
            let t = prod[k];
            if t == 0 {
                continue;
            }
            for i in 0..m {
                let sub = self.mulmod(self.0.unram[i], t);
                prod[k - m + i] = self.addmod(prod[k - m + i], md - sub);
            }
        }
        prod.truncate(m);
        prod
    }

    fn w_pow(&self, a: &[u64], mut n: u64) -> Vec<u64> {
        let m = self.0.m as usize;
        let mut result = vec![0u64; m];
        result[0] = 1;
        let mut base = a.to_vec();
        while n > 0 {
            if n & 1 == 1 {
                result = self.w_mul(&result, &base);
            }
            base = self.w_mul(&base, &base);
            n >>= 1;
        }
        result
    }

    fn ring_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (e, m) = (self.0.e, self.0.m as usize);
        let md = self.0.modulus;
        // unreduced product in both variables
        let mut full = vec![0u64; (2 * e - 1) * (2 * m - 1)];
        let stride = 2 * m - 1;
        for j1 in 0..e {
            let ra = &a[j1 * m..(j1 + 1) * m];
            if ra.iter().all(|&x| x == 0) {
                continue;
            }
            for j2 in 0..e {
                let rb = &b[j2 * m..(j2 + 1) * m];
                if rb.iter().all(|&x| x == 0) {
                    continue;
                }
                let base = (j1 + j2) * stride;
                for (i1, &x) in ra.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (i2, &y) in rb.iter().enumerate() {
                        let k = base + i1 + i2;
                        full[k] = self.addmod(full[k], self.mulmod(x, y));
                    }
                }
            }
        }
        // reduce in x, then in π
        let mut rows: Vec<Vec<u64>> = full
            .chunks(stride)
            .map(|row| self.w_reduce(row.to_vec()))
            .collect();
        for k in (e..rows.len()).rev() {
            let top = std::mem::take(&mut rows[k]);
            if top.iter().all(|&x| x == 0) {
                continue;
            }
            for j in 0..e {
                let c = self.0.eisenstein[j];
                if c == 0 {
                    continue;
                }
                for i in 0..m {
                    let sub = self.mulmod(c, top[i]);
                    rows[k - e + j][i] = self.addmod(rows[k - e + j][i], md - sub);
                }
            }
        }
        rows.truncate(e);
        rows.concat()
    }

    fn ring_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.addmod(x, y)).collect()
    }

    fn ring_neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| (self.0.modulus - x) % self.0.modulus).collect()
    }

    fn vp(&self, mut x: u64) -> u32 {
        if x == 0 {
            return self.0.s;
        }
        let mut v = 0;
        while x % self.0.p == 0 {
            x /= self.0.p;
            v += 1;
        }
        v
    }

    /// π-adic valuation of a body, capped at `e·S`.
    fn ord_pi(&self, body: &[u64]) -> i64 {
        let (e, m) = (self.0.e, self.0.m as usize);
        (0..e)
            .map(|j| {
                let v = body[j * m..(j + 1) * m].iter().map(|&c| self.vp(c)).min().unwrap_or(self.0.s);
                e as i64 * v as i64 + j as i64
            })
            .min()
            .unwrap_or(0)
    }

    /// Divides a body by `π`, assuming its constant coefficient is divisible by p.
    fn div_pi(&self, body: &[u64]) -> Vec<u64> {
        let m = self.0.m as usize;
        let c0: Vec<u64> = body[..m].iter().map(|&c| c / self.0.p).collect();
        let mut out = body[m..].to_vec();
        out.extend(std::iter::repeat(0).take(m));
        // c0 · (p/π), with c0 ∈ W acting on every π-coefficient
        for j in 0..self.0.e {
            let coeff = &self.0.p_over_pi[j * m..(j + 1) * m];
            if coeff.iter().all(|&x| x == 0) {
                continue;
            }
            let prod = self.w_mul(&c0, coeff);
            for i in 0..m {
                out[j * m + i] = self.addmod(out[j * m + i], prod[i]);
            }
        }
        out
    }

    /// Builds `π^v · body` where `body` is known modulo `π^rel`, stripping
    /// powers of π from the body.
    fn normalized(&self, v: i64, body: Vec<u64>, rel: i64) -> LocalElement {
        let rel = rel.min(self.pi_precision());
        let k = self.ord_pi(&body);
        if k >= rel {
            return LocalElement { parent: self.clone(), repr: Repr::Zero { abs: v + rel } };
        }
        let mut body = body;
        for _ in 0..k {
            body = self.div_pi(&body);
        }
        LocalElement { parent: self.clone(), repr: Repr::Unit { v: v + k, body, rel: rel - k } }
    }

    fn ring_unit_inverse(&self, body: &[u64]) -> Vec<u64> {
        let m = self.0.m as usize;
        let k = self.residue_field();
        let res: Vec<u32> = body[..m].iter().map(|&c| (c % self.0.p) as u32).collect();
        let inv = k.inv(k.from_coords(&res)).expect("unit has nonzero residue");
        let mut w = vec![0u64; self.len()];
        for (i, c) in k.coords(inv).into_iter().enumerate() {
            w[i] = c as u64;
        }
        let mut two = vec![0u64; self.len()];
        two[0] = 2 % self.0.modulus;
        // Newton: w ← w(2 − u w), doubling the correct π-adic digits each time
        let mut correct = 1i64;
        while correct < self.0.e as i64 * self.0.s as i64 {
            let uw = self.ring_mul(body, &w);
            w = self.ring_mul(&w, &self.ring_add(&two, &self.ring_neg(&uw)));
            correct *= 2;
        }
        w
    }
}

/// Largest working precision (in p-adic digits) supported for `p`.
pub fn max_precision(p: u64) -> u32 {
    let mut s = 0u32;
    let mut x: u128 = 1;
    while x * (p as u128) < MODULUS_LIMIT {
        x *= p as u128;
        s += 1;
    }
    s.saturating_sub(1)
}

/// Low coefficients of `Φ_{p^{ℓ+1}}(π + 1)`, reduced modulo `modulus`.
fn cyclotomic_shifted(p: u64, level: u32, modulus: u64) -> Result<Vec<u64>> {
    let inner = (p as u128).checked_pow(level).filter(|&x| x <= 1 << 16);
    let Some(inner) = inner else {
        return Err(Error::UnsupportedTower(format!("cyclotomic level {level} too large for p = {p}")));
    };
    let inner = inner as usize;
    let e = (p as usize - 1) * inner;
    // Φ(x) = Σ_{k<p} x^{k·p^ℓ}; expand (π+1)^{k p^ℓ} with binomials mod modulus
    let md = modulus as u128;
    let mut coeffs = vec![0u128; e + 1];
    for k in 0..p as usize {
        let n = k * inner;
        for (j, c) in binomial_row(n, md).into_iter().enumerate() {
            coeffs[j] = (coeffs[j] + c) % md;
        }
    }
    debug_assert_eq!(coeffs[e], 1);
    Ok(coeffs[..e].iter().map(|&c| c as u64).collect())
}

/// Row `n` of Pascal's triangle modulo `md`.
fn binomial_row(n: usize, md: u128) -> Vec<u128> {
    let mut row = vec![0u128; n + 1];
    row[0] = 1 % md;
    for i in 1..=n {
        for j in (1..=i).rev() {
            row[j] = (row[j] + row[j - 1]) % md;
        }
    }
    row
}

#[derive(Clone, Debug)]
enum Repr {
    /// Zero modulo `π^abs`.
    Zero { abs: i64 },
    /// `π^v · body`, body a unit known modulo `π^rel`.
    Unit { v: i64, body: Vec<u64>, rel: i64 },
}

/// An element of a [`LocalField`] with tracked π-adic precision.
#[derive(Clone, Debug)]
pub struct LocalElement {
    parent: LocalField,
    repr: Repr,
}

impl LocalElement {
    pub fn parent(&self) -> &LocalField {
        &self.parent
    }

    /// Absolute precision in π-adic digits: the element is known modulo `π^k`.
    pub fn pi_precision(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Unit { v, rel, .. } => v + rel,
        }
    }

    /// Absolute precision in units of `ord`, i.e. `ord(p) = 1`.
    pub fn abs_precision(&self) -> Q {
        q(self.pi_precision(), self.parent.e() as i64)
    }

    /// True when the element vanishes to its known precision.
    pub fn is_indistinguishable_from_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Exact valuation with `ord(p) = 1`.
    ///
    /// An element that vanishes to the field's full working precision is zero
    /// and has valuation `+inf`; one that vanishes only to a degraded precision
    /// has no certifiable valuation.
    pub fn ord(&self) -> Result<Val> {
        match &self.repr {
            Repr::Unit { v, .. } => Ok(Val::Finite(q(*v, self.parent.e() as i64))),
            Repr::Zero { abs } if *abs >= self.parent.pi_precision() => Ok(Val::PosInf),
            Repr::Zero { abs } => Err(Error::PrecisionLoss(format!(
                "element vanishes modulo pi^{abs} only; valuation not certifiable"
            ))),
        }
    }

    /// Valuation in π-adic units, for nonzero elements.
    pub fn pi_valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { v, .. } => Some(*v),
            Repr::Zero { .. } => None,
        }
    }

    /// A certified lower bound for the valuation.
    pub fn ord_lower_bound(&self) -> Q {
        match &self.repr {
            Repr::Unit { v, .. } => q(*v, self.parent.e() as i64),
            Repr::Zero { abs } => q(*abs, self.parent.e() as i64),
        }
    }

    fn check_parent(&self, other: &LocalElement) -> Result<()> {
        if self.parent == other.parent {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    /// Sum; absolute precision is the minimum of the inputs'.
    pub fn try_add(&self, other: &LocalElement) -> Result<LocalElement> {
        self.check_parent(other)?;
        let f = &self.parent;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                LocalElement { parent: f.clone(), repr: Repr::Zero { abs: *a.min(b) } }
            }
            (Repr::Zero { abs }, Repr::Unit { v, body, rel })
            | (Repr::Unit { v, body, rel }, Repr::Zero { abs }) => {
                if abs <= v {
                    LocalElement { parent: f.clone(), repr: Repr::Zero { abs: *abs } }
                } else {
                    let rel = (*rel).min(abs - v);
                    LocalElement { parent: f.clone(), repr: Repr::Unit { v: *v, body: body.clone(), rel } }
                }
            }
            (
                Repr::Unit { v: v1, body: b1, rel: r1 },
                Repr::Unit { v: v2, body: b2, rel: r2 },
            ) => {
                let (v1, b1, r1, v2, b2, r2) =
                    if v1 <= v2 { (*v1, b1, *r1, *v2, b2, *r2) } else { (*v2, b2, *r2, *v1, b1, *r1) };
                let shift = v2 - v1;
                let rel = r1.min(r2 + shift);
                if shift >= rel {
                    LocalElement {
                        parent: f.clone(),
                        repr: Repr::Unit { v: v1, body: b1.clone(), rel },
                    }
                } else {
                    let shifted = f.ring_mul(b2, &f.pi_power_body(shift));
                    f.normalized(v1, f.ring_add(b1, &shifted), rel)
                }
            }
        })
    }

    pub fn try_sub(&self, other: &LocalElement) -> Result<LocalElement> {
        self.try_add(&-other)
    }

    /// Product; relative precision is the minimum of the inputs'.
    pub fn try_mul(&self, other: &LocalElement) -> Result<LocalElement> {
        self.check_parent(other)?;
        let f = &self.parent;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                LocalElement { parent: f.clone(), repr: Repr::Zero { abs: a + b } }
            }
            (Repr::Zero { abs }, Repr::Unit { v, .. }) | (Repr::Unit { v, .. }, Repr::Zero { abs }) => {
                LocalElement { parent: f.clone(), repr: Repr::Zero { abs: abs + v } }
            }
            (
                Repr::Unit { v: v1, body: b1, rel: r1 },
                Repr::Unit { v: v2, body: b2, rel: r2 },
            ) => LocalElement {
                parent: f.clone(),
                repr: Repr::Unit { v: v1 + v2, body: f.ring_mul(b1, b2), rel: *r1.min(r2) },
            },
        })
    }

    /// Multiplicative inverse; requires a certifiably nonzero input.
    pub fn inv(&self) -> Result<LocalElement> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::DivisionByUncertifiedZero),
            Repr::Unit { v, body, rel } => Ok(LocalElement {
                parent: self.parent.clone(),
                repr: Repr::Unit { v: -v, body: self.parent.ring_unit_inverse(body), rel: *rel },
            }),
        }
    }

    pub fn try_div(&self, other: &LocalElement) -> Result<LocalElement> {
        self.try_mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, n: i64) -> Result<LocalElement> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut result = self.parent.one();
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                result = result.try_mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Image of a unit in the residue field.
    pub fn residue_of_unit(&self) -> Result<FFElement> {
        match &self.repr {
            Repr::Unit { v: 0, body, .. } => {
                let f = &self.parent;
                let m = f.m() as usize;
                let coords: Vec<u32> = body[..m].iter().map(|&c| (c % f.p()) as u32).collect();
                let k = f.residue_field();
                Ok(k.element(k.from_coords(&coords)))
            }
            Repr::Unit { v, .. } => Err(Error::NotAUnit(crate::rational::fmt_q(&q(*v, self.parent.e() as i64)))),
            Repr::Zero { abs } if *abs > 0 => Err(Error::NotAUnit(format!(">= {}", crate::rational::fmt_q(&q(*abs, self.parent.e() as i64))))),
            Repr::Zero { .. } => Err(Error::PrecisionLoss("residue not certifiable".into())),
        }
    }

    /// Residue of `x / π^{v}` where `v` is the π-adic valuation: the leading
    /// coefficient in the π-adic expansion.
    pub fn leading_residue(&self) -> Result<FFElement> {
        match &self.repr {
            Repr::Unit { v, .. } => self.try_mul(&self.parent.pi_pow(-v))?.residue_of_unit(),
            Repr::Zero { .. } => Err(Error::DivisionByUncertifiedZero),
        }
    }

    /// Forgets every digit at or beyond `π^k`.
    pub fn truncate_to(&self, k: i64) -> LocalElement {
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Zero { abs } => *abs = (*abs).min(k),
            Repr::Unit { v, rel, .. } => {
                if k <= *v {
                    out.repr = Repr::Zero { abs: k };
                } else {
                    *rel = (*rel).min(k - *v);
                }
            }
        }
        out
    }

    /// π-adic digits `(exponent, coefficient in W)` of the known part, with
    /// W-coefficients written in the residue-field generator basis as integers
    /// modulo the working precision.
    fn digits(&self) -> Vec<(i64, Vec<u64>)> {
        match &self.repr {
            Repr::Zero { .. } => Vec::new(),
            Repr::Unit { v, body, rel } => {
                let f = &self.parent;
                let m = f.m() as usize;
                let mut out = Vec::new();
                for j in 0..f.0.e {
                    let c = &body[j * m..(j + 1) * m];
                    if c.iter().any(|&x| x != 0) && (j as i64) < *rel {
                        out.push((v + j as i64, c.to_vec()));
                    }
                }
                out
            }
        }
    }
}

impl LocalField {
    fn pi_power_body(&self, k: i64) -> Vec<u64> {
        let mut body = vec![0u64; self.len()];
        body[0] = 1;
        let mut pi = vec![0u64; self.len()];
        if self.0.e > 1 {
            pi[self.0.m as usize] = 1;
        } else {
            // degree-one relation π + E_0 = 0
            pi[0] = (self.0.modulus - self.0.eisenstein[0]) % self.0.modulus;
        }
        for _ in 0..k {
            body = self.ring_mul(&body, &pi);
        }
        body
    }
}

impl PartialEq for LocalElement {
    /// Equality to the common known precision.
    fn eq(&self, other: &Self) -> bool {
        self.try_sub(other)
            .map(|d| d.is_indistinguishable_from_zero())
            .unwrap_or(false)
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = &self.parent;
        let mut parts = Vec::new();
        for (exp, coeff) in self.digits() {
            let c = if field.m() == 1 {
                coeff[0].to_string()
            } else {
                let terms: Vec<String> = coeff
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| match i {
                        0 => c.to_string(),
                        1 => format!("{c}*g"),
                        _ => format!("{c}*g^{i}"),
                    })
                    .collect();
                format!("({})", terms.join("+"))
            };
            parts.push(match exp {
                0 => c,
                1 => format!("{c}*pi"),
                _ => format!("{c}*pi^{exp}"),
            });
        }
        parts.push(format!("O(pi^{})", self.pi_precision()));
        f.write_str(&parts.join(" + "))
    }
}

macro_rules! local_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&LocalElement> for &LocalElement {
            type Output = LocalElement;
            /// Panics if the operands live in different fields.
            fn $method(self, rhs: &LocalElement) -> LocalElement {
                self.$checked(rhs).expect("operands from different local fields")
            }
        }
        impl std::ops::$tr for LocalElement {
            type Output = LocalElement;
            fn $method(self, rhs: LocalElement) -> LocalElement {
                (&self).$method(&rhs)
            }
        }
    };
}

local_binop!(Add, add, try_add);
local_binop!(Sub, sub, try_sub);
local_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        let repr = match &self.repr {
            Repr::Zero { abs } => Repr::Zero { abs: *abs },
            Repr::Unit { v, body, rel } => {
                Repr::Unit { v: *v, body: self.parent.ring_neg(body), rel: *rel }
            }
        };
        LocalElement { parent: self.parent.clone(), repr }
    }
}

impl std::ops::Neg for LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        -&self
    }
}

// ---- descriptors --------------------------------------------------------

impl fmt::Display for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Qp({};u={};", self.0.p, self.0.m)?;
        match self.0.kind {
            TowerKind::EisensteinRootOfP { e } => write!(f, "pi^{e}=p")?,
            TowerKind::Cyclotomic { level } => {
                write!(f, "pi=zeta_{}-1", self.0.p.pow(level + 1))?
            }
        }
        write!(f, ";N={})", self.0.n)
    }
}

impl FromStr for LocalField {
    type Err = Error;

    /// Parses `Qp(p;u=m;pi^e=p;N=n)` or `Qp(p;u=m;pi=zeta_{p^k}-1;N=n)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix("Qp(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("field descriptor must look like Qp(...), got {s:?}")))?;
        let (p, rest) = inner.split_once(';').unwrap_or((inner, ""));
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad prime in {s:?}")))?;
        parse_descriptor(rest, p, None)
    }
}

/// Parses the `;`-separated parts of a descriptor (`u=`, `pi^e=p` or
/// `pi=zeta_k-1`, `N=`) for a given prime. Missing parts default to `u=2`,
/// `pi^1=p`, and `default_n` (or [`DEFAULT_PRECISION`]).
pub fn parse_descriptor(parts: &str, p: u64, default_n: Option<u32>) -> Result<LocalField> {
    let mut m = None;
    let mut kind = None;
    let mut n = None;
    for part in parts.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("descriptor part {part:?} lacks '='")))?;
        let key = key.trim();
        let value = value.trim();
        let parse_u32 = |v: &str| -> Result<u32> {
            v.parse().map_err(|_| Error::parse(format!("bad number {v:?} in {part:?}")))
        };
        if key == "u" {
            set_once(&mut m, parse_u32(value)?, "u")?;
        } else if key == "N" {
            set_once(&mut n, parse_u32(value)?, "N")?;
        } else if let Some(e) = key.strip_prefix("pi^") {
            if value != "p" {
                return Err(Error::parse(format!("expected pi^e=p, got {part:?}")));
            }
            let e = parse_u32(e)?;
            if kind.is_some() {
                return Err(Error::UnsupportedTower("more than one ramified generator".into()));
            }
            kind = Some(TowerKind::EisensteinRootOfP { e });
        } else if key == "pi" {
            let order = value
                .strip_prefix("zeta_")
                .and_then(|r| r.strip_suffix("-1"))
                .ok_or_else(|| Error::parse(format!("expected pi=zeta_k-1, got {part:?}")))?;
            let order: u64 = order
                .parse()
                .map_err(|_| Error::parse(format!("bad root-of-unity order in {part:?}")))?;
            let level = prime_power_level(order, p).ok_or_else(|| {
                Error::UnsupportedTower(format!("zeta_{order} is not a p-power root of unity for p = {p}"))
            })?;
            if kind.is_some() {
                return Err(Error::UnsupportedTower("more than one ramified generator".into()));
            }
            kind = Some(TowerKind::Cyclotomic { level });
        } else {
            return Err(Error::parse(format!("unknown descriptor part {part:?}")));
        }
    }
    let kind = kind.unwrap_or(TowerKind::EisensteinRootOfP { e: 1 });
    LocalField::new(p, m.unwrap_or(2), kind, n.or(default_n).unwrap_or(DEFAULT_PRECISION))
}

fn set_once(slot: &mut Option<u32>, v: u32, name: &str) -> Result<()> {
    if slot.replace(v).is_some() {
        return Err(Error::parse(format!("{name} given twice")));
    }
    Ok(())
}

/// `ℓ` with `order = p^{ℓ+1}`, if any.
fn prime_power_level(order: u64, p: u64) -> Option<u32> {
    if p < 2 {
        return None;
    }
    let mut x = order;
    let mut k = 0u32;
    while x > 1 && x % p == 0 {
        x /= p;
        k += 1;
    }
    (x == 1 && k >= 1).then(|| k - 1)
}

/// Free-function form of [`LocalElement::ord`].
pub fn ord(x: &LocalElement) -> Result<Val> {
    x.ord()
}

/// Free-function form of [`LocalElement::residue_of_unit`].
pub fn residue_of_unit(x: &LocalElement) -> Result<FFElement> {
    x.residue_of_unit()
}

/// Free-function form of [`LocalField::teichmuller`].
pub fn teichmuller(c: &FFElement, field: &LocalField) -> Result<LocalElement> {
    field.teichmuller(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eis(p: u64, m: u32, e: u32) -> LocalField {
        make_field(p, m, TowerKind::EisensteinRootOfP { e }, 8).unwrap()
    }

    fn fin(x: Q) -> Val {
        Val::Finite(x)
    }

    #[test]
    fn construction_and_errors() {
        let f = eis(3, 1, 4);
        assert_eq!(f.e(), 4);
        assert_eq!(f.residue_field().order(), 3);
        assert_eq!(f.uniformizer().pow(4).unwrap(), f.from_int(3));
        let c = make_field(3, 1, TowerKind::Cyclotomic { level: 1 }, 6).unwrap();
        assert_eq!(c.e(), 6);
        assert_eq!(make_field(4, 1, TowerKind::EisensteinRootOfP { e: 2 }, 8).unwrap_err(), Error::NonPrime(4));
        assert!(matches!(
            make_field(3, 1, TowerKind::EisensteinRootOfP { e: 2 }, 200),
            Err(Error::PrecisionTooLarge { .. })
        ));
    }

    #[test]
    fn basic_valuations() {
        let f = eis(3, 1, 4);
        assert_eq!(f.from_int(3).ord().unwrap(), fin(q(1, 1)));
        assert_eq!(f.uniformizer().ord().unwrap(), fin(q(1, 4)));
        let x = f.uniformizer() * f.from_int(2);
        assert_eq!((&x * &x).ord().unwrap(), fin(q(1, 2)));
        assert_eq!(f.zero().ord().unwrap(), Val::PosInf);
        assert_eq!((f.from_int(3) - f.from_int(3)).ord().unwrap(), Val::PosInf);
        let c = make_field(3, 1, TowerKind::Cyclotomic { level: 1 }, 6).unwrap();
        assert_eq!(c.uniformizer().ord().unwrap(), fin(q(1, 6)));
        assert_eq!(c.from_int(3).ord().unwrap(), fin(q(1, 1)));
    }

    #[test]
    fn cyclotomic_uniformizer_is_root_of_unity_minus_one() {
        let c = make_field(3, 1, TowerKind::Cyclotomic { level: 1 }, 6).unwrap();
        let zeta = c.one() + c.uniformizer();
        assert_eq!(zeta.pow(9).unwrap(), c.one());
        assert_ne!(zeta.pow(3).unwrap(), c.one());
    }

    #[test]
    fn inverse_and_precision() {
        let f = eis(3, 2, 4);
        let pi = f.uniformizer();
        assert_eq!(pi.inv().unwrap() * pi.clone(), f.one());
        let y = f.one() + f.uniformizer();
        let prod = y.inv().unwrap() * y;
        assert_eq!(prod, f.one());
        assert_eq!(prod.pi_precision(), f.pi_precision());
        assert_eq!(f.zero().inv().unwrap_err(), Error::DivisionByUncertifiedZero);
        // a zero known only to reduced precision has no certifiable valuation
        let low = f.from_int(5).truncate_to(2) - f.from_int(5);
        assert!(matches!(low.ord(), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn residues_and_teichmuller() {
        let f = eis(3, 2, 4);
        let k = f.residue_field().clone();
        assert!((f.one() + f.uniformizer()).residue_of_unit().unwrap().is_one());
        assert_eq!(f.from_int(-1).residue_of_unit().unwrap(), k.element(2));
        assert!(matches!(f.uniformizer().residue_of_unit(), Err(Error::NotAUnit(_))));
        let g = k.generator();
        let t = f.teichmuller(&g).unwrap();
        assert_eq!((&t * &(f.one() + f.uniformizer())).residue_of_unit().unwrap(), g);
        assert_eq!(t.pow(9).unwrap(), t);
        assert_eq!(t.pow(8).unwrap(), f.one());
        assert_ne!(t.pow(4).unwrap(), f.one());
        assert_eq!(f.teichmuller(&k.zero()).unwrap().ord().unwrap(), Val::PosInf);
        assert_eq!(f.teichmuller(&k.one()).unwrap(), f.one());
    }

    #[test]
    fn descriptors_round_trip() {
        for s in ["Qp(3;u=2;pi^4=p;N=8)", "Qp(3;u=1;pi=zeta_9-1;N=6)", "Qp(5;u=1;pi=zeta_5-1;N=4)"] {
            let f: LocalField = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!(matches!(
            "Qp(3;u=1;pi^2=p;pi=zeta_9-1;N=6)".parse::<LocalField>(),
            Err(Error::UnsupportedTower(_))
        ));
        assert!(matches!("Qp(3;u=1".parse::<LocalField>(), Err(Error::Parse(_))));
        let f = parse_descriptor("pi^4=p;u=2", 5, None).unwrap();
        assert_eq!(f.to_string(), "Qp(5;u=2;pi^4=p;N=8)");
    }
}
