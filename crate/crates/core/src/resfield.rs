//! Finite fields `F_{p^m}` with explicit Frobenius, plus matrices and
//! semilinear maps over them.
//!
//! Elements are encoded as integers `Σ c_i p^i` where `(c_0, …, c_{m-1})` are
//! the coordinates in the power basis `1, g, …, g^{m-1}`. The defining
//! polynomial is always primitive, so `g` generates the multiplicative group
//! and multiplication runs through discrete-log tables.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Largest field order for which log tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

struct FieldData {
    p: u32,
    m: u32,
    q: u32,
    seed: u32,
    /// Low coefficients `c_0..c_{m-1}` of the monic defining polynomial.
    modulus: Vec<u32>,
    /// `exp[i]` is the code of `g^i`, for `0 <= i < q - 1`.
    exp: Vec<u32>,
    /// `log[c]` is the discrete log of the nonzero code `c`.
    log: Vec<u32>,
    /// Zech logarithms: `zech[l] = log(1 + g^l)`, `NO_LOG` where that sum is 0.
    zech: Vec<u32>,
}

const NO_LOG: u32 = u32::MAX;

/// Digit-wise sum of two codes.
fn add_digits(p: u32, m: u32, a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    for _ in 0..m {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// A finite field `F_{p^m}` with a fixed primitive defining polynomial.
#[derive(Clone)]
pub struct GaloisField(Arc<FieldData>);

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {})", self.0.p, self.0.m, self.modulus_string())
    }
}

/// Builds `F_{p^m}` from the `seed`-th primitive monic polynomial of degree
/// `m`, counting from zero in lexicographic order of the coefficient tuple
/// `(c_{m-1}, …, c_0)`.
pub fn ff_make(p: u64, m: u32, seed: u32) -> Result<GaloisField> {
    GaloisField::new(p, m, seed)
}

impl GaloisField {
    pub fn new(p: u64, m: u32, seed: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if m == 0 {
            return Err(Error::Precondition("extension degree must be positive".into()));
        }
        let q = (p as u128).checked_pow(m).filter(|&q| q <= MAX_FIELD_ORDER as u128);
        let Some(q) = q else {
            return Err(Error::Precondition(format!(
                "field order {p}^{m} exceeds {MAX_FIELD_ORDER}"
            )));
        };
        let (p, q) = (p as u32, q as u32);
        let mut found = 0u32;
        // Codes enumerate (c_0, …, c_{m-1}) with c_0 least significant; reading
        // the code with c_{m-1} most significant is exactly lexicographic order
        // on (c_{m-1}, …, c_0), so the coefficient tuple is taken in that order.
        for idx in 0..q {
            let coeffs = lex_tuple(idx, p, m);
            if let Some(exp) = primitive_power_table(p, m, q, &coeffs) {
                if found == seed {
                    let mut log = vec![0u32; q as usize];
                    for (i, &c) in exp.iter().enumerate() {
                        log[c as usize] = i as u32;
                    }
                    let zech = exp
                        .iter()
                        .map(|&c| match add_digits(p, m, 1, c) {
                            0 => NO_LOG,
                            s => log[s as usize],
                        })
                        .collect();
                    return Ok(GaloisField(Arc::new(FieldData {
                        p,
                        m,
                        q,
                        seed,
                        modulus: coeffs,
                        exp,
                        log,
                        zech,
                    })));
                }
                found += 1;
            }
        }
        Err(Error::Precondition(format!(
            "only {found} primitive polynomials of degree {m} over F_{p}"
        )))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn seed(&self) -> u32 {
        self.0.seed
    }

    /// Low coefficients of the monic defining polynomial, `c_0` first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut s = format!("x^{}", self.0.m);
        for i in (0..self.0.m as usize).rev() {
            let c = self.0.modulus[i];
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { format!("{c}") };
            let sep = if coef.is_empty() { "" } else { "*" };
            match i {
                0 => s.push_str(&format!("+{c}")),
                1 => s.push_str(&format!("+{coef}{sep}x")),
                _ => s.push_str(&format!("+{coef}{sep}x^{i}")),
            }
        }
        s
    }

    // ---- raw code arithmetic -------------------------------------------

    pub fn coords(&self, a: u32) -> Vec<u32> {
        let p = self.0.p;
        let mut a = a;
        (0..self.0.m)
            .map(|_| {
                let c = a % p;
                a /= p;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> u32 {
        let p = self.0.p;
        coords.iter().rev().fold(0, |acc, &c| acc * p + c % p)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        // a + b = a (1 + b/a)
        let n = self.0.q - 1;
        let (la, lb) = (self.0.log[a as usize], self.0.log[b as usize]);
        match self.0.zech[((lb + n - la) % n) as usize] {
            NO_LOG => 0,
            z => self.0.exp[((la + z) % n) as usize],
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 || self.0.p == 2 {
            return a;
        }
        // −1 = g^{(q−1)/2}
        let n = self.0.q - 1;
        self.0.exp[((self.0.log[a as usize] + n / 2) % n) as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.0.q - 1;
        let l = (self.0.log[a as usize] + self.0.log[b as usize]) % n;
        self.0.exp[l as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.0.q - 1;
        let l = (n - self.0.log[a as usize]) % n;
        Some(self.0.exp[l as usize])
    }

    /// `a^e` for any integer exponent; `0^e` is `0` for `e > 0`, `1` for `e = 0`.
    pub fn pow(&self, a: u32, e: i64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.0.q - 1) as i64;
        let l = (self.0.log[a as usize] as i64 * e.rem_euclid(n)).rem_euclid(n);
        self.0.exp[l as usize]
    }

    /// `σ^i(a) = a^{p^i}`; negative `i` applies the inverse automorphism.
    pub fn frob(&self, a: u32, i: i64) -> u32 {
        if a == 0 {
            return 0;
        }
        let m = self.0.m as i64;
        let i = i.rem_euclid(m) as u32;
        let n = (self.0.q - 1) as u64;
        let mut l = self.0.log[a as usize] as u64;
        for _ in 0..i {
            l = l * self.0.p as u64 % n;
        }
        self.0.exp[l as usize]
    }

    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.0.log[a as usize])
    }

    pub fn gen_code(&self) -> u32 {
        self.0.exp[1 % (self.0.q as usize - 1).max(1)]
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.0.p as i64) as u32
    }

    /// Returns some `r` with `r^n = a`, the one of smallest code, or `None`.
    pub fn nth_root(&self, a: u32, n: u64) -> Option<u32> {
        if n == 0 {
            return (a == 1).then_some(1);
        }
        if a == 0 {
            return Some(0);
        }
        (1..self.0.q).find(|&r| self.pow(r, n as i64) == a)
    }

    /// Smallest degree over `F_p` of an extension of this field containing an
    /// `n`-th root of `a`.
    pub fn root_extension_degree(&self, a: u32, n: u64) -> u32 {
        if a == 0 || n == 0 {
            return self.0.m;
        }
        let qm1 = (self.0.q - 1) as u64;
        let l = self.0.log[a as usize] as u64;
        let order = qm1 / num_integer::gcd(l, qm1);
        let q = self.0.q as u128;
        let mut qk = q;
        for k in 1..=64u32 {
            let big = qk - 1;
            let g = num_integer::gcd(n as u128, big);
            if (big / g) % order as u128 == 0 {
                return self.0.m * k;
            }
            qk = qk.saturating_mul(q);
        }
        u32::MAX
    }

    pub fn element(&self, code: u32) -> FFElement {
        debug_assert!(code < self.0.q);
        FFElement { field: self.clone(), code }
    }

    pub fn zero(&self) -> FFElement {
        self.element(0)
    }

    pub fn one(&self) -> FFElement {
        self.element(1)
    }

    pub fn generator(&self) -> FFElement {
        self.element(self.gen_code())
    }

    pub fn elements(&self) -> impl Iterator<Item = FFElement> + '_ {
        (0..self.0.q).map(move |c| self.element(c))
    }

    pub fn units(&self) -> impl Iterator<Item = FFElement> + '_ {
        (1..self.0.q).map(move |c| self.element(c))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FFElement {
        self.element(rng.gen_range(0..self.0.q))
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> FFElement {
        self.element(rng.gen_range(1..self.0.q))
    }

    pub fn format_code(&self, code: u32) -> String {
        let coords = self.coords(code);
        let mut parts = Vec::new();
        for (k, &c) in coords.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let part = match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "g".to_string(),
                (1, c) => format!("{c}*g"),
                (k, 1) => format!("g^{k}"),
                (k, c) => format!("{c}*g^{k}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }

    /// Parses a polynomial in the generator, e.g. `2*g+1`, `g^3 - 1`, `5`.
    pub fn parse_element(&self, s: &str) -> Result<FFElement> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::parse("empty field element"));
        }
        let mut total = 0u32;
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut negative = false;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                negative = bytes[i] == b'-';
                i += 1;
            } else if i != 0 {
                return Err(Error::parse(format!("expected sign in {s:?}")));
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let term = self.parse_term(&s[start..i])?;
            total = if negative { self.sub(total, term) } else { self.add(total, term) };
        }
        Ok(self.element(total))
    }

    fn parse_term(&self, t: &str) -> Result<u32> {
        if t.is_empty() {
            return Err(Error::parse("empty term in field element"));
        }
        let (coef, mono) = match t.find('g') {
            None => (t, None),
            Some(pos) => {
                let coef = t[..pos].strip_suffix('*').unwrap_or(&t[..pos]);
                if pos > 0 && coef.len() == pos && !coef.is_empty() {
                    return Err(Error::parse(format!("missing '*' in term {t:?}")));
                }
                (if coef.is_empty() { "1" } else { coef }, Some(&t[pos + 1..]))
            }
        };
        let c: i64 = coef
            .parse()
            .map_err(|_| Error::parse(format!("bad coefficient in term {t:?}")))?;
        let c = self.from_int(c.rem_euclid(self.0.p as i64));
        let power = match mono {
            None => 1,
            Some("") => self.gen_code(),
            Some(rest) => {
                let e = rest
                    .strip_prefix('^')
                    .ok_or_else(|| Error::parse(format!("bad monomial in term {t:?}")))?;
                let e: i64 = e
                    .parse()
                    .map_err(|_| Error::parse(format!("bad exponent in term {t:?}")))?;
                self.pow(self.gen_code(), e)
            }
        };
        Ok(self.mul(c, power))
    }

    /// Finds the image of this field's generator inside a larger field,
    /// taking the root of smallest code of this field's defining polynomial.
    pub fn embedding_into(&self, target: &GaloisField) -> Result<Embedding> {
        if self.p() != target.p() || target.m() % self.m() != 0 {
            return Err(Error::Precondition(format!(
                "F_{}^{} does not embed in F_{}^{}",
                self.p(),
                self.m(),
                target.p(),
                target.m()
            )));
        }
        let root = (0..target.order())
            .find(|&r| {
                // evaluate x^m + Σ c_i x^i at r
                let mut acc = target.pow(r, self.m() as i64);
                for (i, &c) in self.modulus().iter().enumerate() {
                    let term = target.mul(target.from_int(c as i64), target.pow(r, i as i64));
                    acc = target.add(acc, term);
                }
                acc == 0
            })
            .ok_or_else(|| Error::Precondition("defining polynomial has no root".into()))?;
        let powers = (0..self.m()).map(|i| target.pow(root, i as i64)).collect();
        Ok(Embedding { source: self.clone(), target: target.clone(), powers })
    }
}

fn lex_tuple(idx: u32, p: u32, m: u32) -> Vec<u32> {
    // idx read in base p with the most significant digit giving c_{m-1}
    let mut digits = vec![0u32; m as usize];
    let mut x = idx;
    for slot in digits.iter_mut() {
        *slot = x % p;
        x /= p;
    }
    digits
}

/// Powers of `x` modulo the monic polynomial with low coefficients `coeffs`,
/// if `x` has multiplicative order exactly `q - 1`.
fn primitive_power_table(p: u32, m: u32, q: u32, coeffs: &[u32]) -> Option<Vec<u32>> {
    if coeffs[0] == 0 {
        return None;
    }
    let n = (q - 1) as usize;
    let mut exp = Vec::with_capacity(n);
    let mut cur = vec![0u32; m as usize];
    cur[0] = 1;
    let encode = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &c| acc * p + c);
    for i in 0..n {
        let code = encode(&cur);
        if i > 0 && code == 1 {
            return None;
        }
        exp.push(code);
        // multiply by x: shift up and reduce x^m = -Σ c_i x^i
        let top = cur[m as usize - 1];
        for j in (1..m as usize).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        for j in 0..m as usize {
            cur[j] = (cur[j] + (p - coeffs[j]) * top) % p;
        }
    }
    (encode(&cur) == 1).then_some(exp)
}

/// Field embedding `F_{p^a} → F_{p^b}` determined by the image of `g`.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: GaloisField,
    target: GaloisField,
    powers: Vec<u32>,
}

impl Embedding {
    pub fn target(&self) -> &GaloisField {
        &self.target
    }

    pub fn apply(&self, x: &FFElement) -> FFElement {
        debug_assert!(x.field == self.source);
        let t = &self.target;
        let code = self
            .source
            .coords(x.code)
            .iter()
            .zip(&self.powers)
            .fold(0, |acc, (&c, &gp)| t.add(acc, t.mul(t.from_int(c as i64), gp)));
        t.element(code)
    }
}

/// An element of `F_{p^m}` carrying its parent field.
#[derive(Clone, PartialEq, Eq)]
pub struct FFElement {
    field: GaloisField,
    code: u32,
}

impl FFElement {
    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn is_one(&self) -> bool {
        self.code == 1
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.code)
    }

    pub fn inv(&self) -> Option<FFElement> {
        self.field.inv(self.code).map(|c| self.field.element(c))
    }

    pub fn pow(&self, e: i64) -> FFElement {
        self.field.element(self.field.pow(self.code, e))
    }

    /// `x^{p^i}`.
    pub fn frobenius(&self, i: i64) -> FFElement {
        self.field.element(self.field.frob(self.code, i))
    }

    /// True when the element lies in the prime field.
    pub fn in_prime_field(&self) -> bool {
        self.frobenius(1) == *self
    }

    /// Multiplicative order; zero has order 0.
    pub fn multiplicative_order(&self) -> u32 {
        match self.field.log(self.code) {
            None => 0,
            Some(l) => {
                let n = self.field.order() - 1;
                n / num_integer::gcd(l, n)
            }
        }
    }

    fn binop(&self, other: &FFElement, f: impl Fn(&GaloisField, u32, u32) -> u32) -> FFElement {
        assert!(self.field == other.field, "field elements from different fields");
        self.field.element(f(&self.field, self.code, other.code))
    }
}

impl fmt::Display for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_code(self.code))
    }
}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for FFElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! ff_binop {
    ($tr:ident, $method:ident, $op:ident) => {
        impl std::ops::$tr<&FFElement> for &FFElement {
            type Output = FFElement;
            fn $method(self, rhs: &FFElement) -> FFElement {
                self.binop(rhs, |f, a, b| f.$op(a, b))
            }
        }
        impl std::ops::$tr for FFElement {
            type Output = FFElement;
            fn $method(self, rhs: FFElement) -> FFElement {
                (&self).$method(&rhs)
            }
        }
    };
}

ff_binop!(Add, add, add);
ff_binop!(Sub, sub, sub);
ff_binop!(Mul, mul, mul);

impl std::ops::Neg for &FFElement {
    type Output = FFElement;
    fn neg(self) -> FFElement {
        self.field.element(self.field.neg(self.code))
    }
}

impl std::ops::Neg for FFElement {
    type Output = FFElement;
    fn neg(self) -> FFElement {
        -&self
    }
}

/// `x^{p^i}`, the free-function form of [`FFElement::frobenius`].
pub fn frobenius(x: &FFElement, i: i64) -> FFElement {
    x.frobenius(i)
}

// ---- matrices ---------------------------------------------------------

/// Dense matrix over a finite field, stored row-major as element codes.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: GaloisField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).unwrap_or_default())
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self.field.format_code(self.get(r, c)))
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl Matrix {
    pub fn zero(field: &GaloisField, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &GaloisField, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from its columns (images of basis vectors).
    pub fn from_columns(field: &GaloisField, cols: &[Vec<u32>]) -> Self {
        let n = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zero(field, n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_rows(field: &GaloisField, rows: &[Vec<u32>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, got: bad.len() });
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(Matrix { field: field.clone(), rows: r, cols: c, data })
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entry(&self, r: usize, c: usize) -> FFElement {
        self.field.element(self.get(r, c))
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let f = &self.field;
        let mut out = Matrix::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = f.add(out.get(i, j), f.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(0, |acc, k| f.add(acc, f.mul(self.get(i, k), v[k]))))
            .collect())
    }

    /// Entrywise `σ^i`.
    pub fn frobenius(&self, i: i64) -> Matrix {
        let data = self.data.iter().map(|&x| self.field.frob(x, i)).collect();
        Matrix { data, ..self.clone() }
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: other.rows });
        }
        let mut out = Matrix::zero(&self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and pivot columns.
    fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for c in 0..m.cols {
                let (a, b) = (m.get(row, c), m.get(pr, c));
                m.set(row, c, b);
                m.set(pr, c, a);
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in 0..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r != row && factor != 0 {
                    for c in 0..m.cols {
                        let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.cols];
                v[fc] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(i, fc));
                }
                v
            })
            .collect()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(&self.field, n)).ok()?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Matrix::zero(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j));
            }
        }
        Some(out)
    }
}

// ---- semilinear maps ----------------------------------------------------

/// A map `c ↦ M · σ^{twist}(c)` on coordinate vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemilinearMap {
    pub matrix: Matrix,
    pub twist: i64,
}

impl SemilinearMap {
    pub fn new(matrix: Matrix, twist: i64) -> Self {
        SemilinearMap { matrix, twist }
    }

    pub fn identity(field: &GaloisField, n: usize) -> Self {
        SemilinearMap::new(Matrix::identity(field, n), 0)
    }

    pub fn field(&self) -> &GaloisField {
        self.matrix.field()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, c: &[FFElement]) -> Result<Vec<FFElement>> {
        let f = self.field();
        let twisted: Vec<u32> = c.iter().map(|x| f.frob(x.code(), self.twist)).collect();
        Ok(self.matrix.mul_vec(&twisted)?.into_iter().map(|x| f.element(x)).collect())
    }

    pub fn apply_codes(&self, c: &[u32]) -> Result<Vec<u32>> {
        let f = self.field();
        let twisted: Vec<u32> = c.iter().map(|&x| f.frob(x, self.twist)).collect();
        self.matrix.mul_vec(&twisted)
    }

    /// `self ∘ other`, i.e. `(A, i) ∘ (B, j) = (A · σ^i(B), i + j)`.
    pub fn compose(&self, other: &SemilinearMap) -> Result<SemilinearMap> {
        let m = self.matrix.mul(&other.matrix.frobenius(self.twist))?;
        Ok(SemilinearMap::new(m, self.twist + other.twist))
    }
}

/// Free-function form of [`SemilinearMap::apply`].
pub fn apply(map: &SemilinearMap, c: &[FFElement]) -> Result<Vec<FFElement>> {
    map.apply(c)
}

/// Free-function form of [`SemilinearMap::compose`].
pub fn compose(f: &SemilinearMap, g: &SemilinearMap) -> Result<SemilinearMap> {
    f.compose(g)
}
