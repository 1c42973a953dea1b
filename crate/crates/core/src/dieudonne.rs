//! Rank-4 mod-p Dieudonné modules with an action of the quaternion order.
//!
//! The basis is always `(e0, f0, e1, f1)`; component 0 is `{e0, f0}` and
//! component 1 is `{e1, f1}`. Matrices hold images of basis vectors in their
//! columns. `F` is σ-semilinear (twist +1), `V` is σ⁻¹-semilinear (twist −1),
//! and `Π` is linear with `Π e0 = Π e1 = 0`, `Π f0 = e1`, `Π f1 = e0`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resfield::{FFElement, GaloisField, Matrix, SemilinearMap};

pub const E0: usize = 0;
pub const F0: usize = 1;
pub const E1: usize = 2;
pub const F1: usize = 3;

/// Default cap on the number of candidate maps in an exhaustive search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// The five normal forms of the mod-p module over the period domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StratumPresentation {
    MiddleSS,
    LowerSS,
    UpperSS,
    LowerFamily(FFElement),
    UpperFamily(FFElement),
}

impl StratumPresentation {
    pub fn name(&self) -> &'static str {
        match self {
            StratumPresentation::MiddleSS => "MiddleSS",
            StratumPresentation::LowerSS => "LowerSS",
            StratumPresentation::UpperSS => "UpperSS",
            StratumPresentation::LowerFamily(_) => "LowerFamily",
            StratumPresentation::UpperFamily(_) => "UpperFamily",
        }
    }

    pub fn u(&self) -> Option<&FFElement> {
        match self {
            StratumPresentation::LowerFamily(u) | StratumPresentation::UpperFamily(u) => Some(u),
            _ => None,
        }
    }

    pub fn is_superspecial(&self) -> bool {
        self.u().is_none()
    }
}

impl fmt::Display for StratumPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.u() {
            Some(u) => write!(f, "{}({u})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// A rank-4 mod-p Dieudonné module with Π-action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DieudonneModP {
    field: GaloisField,
    f: SemilinearMap,
    v: SemilinearMap,
    pi: SemilinearMap,
}

/// The fixed matrix of Π.
pub fn pi_matrix(field: &GaloisField) -> Matrix {
    let mut m = Matrix::zero(field, 4, 4);
    m.set(E1, F0, 1);
    m.set(E0, F1, 1);
    m
}

fn columns(field: &GaloisField, images: [&[(usize, u32)]; 4]) -> Matrix {
    let cols: Vec<Vec<u32>> = images
        .iter()
        .map(|img| {
            let mut col = vec![0u32; 4];
            for &(i, c) in img.iter() {
                col[i] = field.add(col[i], c);
            }
            col
        })
        .collect();
    Matrix::from_columns(field, &cols)
}

/// Builds the module with the F/V tables of the given normal form.
pub fn presentation(label: &StratumPresentation, field: &GaloisField) -> Result<DieudonneModP> {
    let k = field;
    if let Some(u) = label.u() {
        if u.field() != k {
            return Err(Error::ParentMismatch);
        }
        if u.is_zero() {
            return Err(Error::ZeroU);
        }
    }
    let (fm, vm) = match label {
        StratumPresentation::MiddleSS => {
            let m = columns(k, [&[], &[(E1, 1)], &[], &[(E0, 1)]]);
            (m.clone(), m)
        }
        StratumPresentation::LowerSS => {
            let m = columns(k, [&[(E1, 1)], &[], &[], &[(F0, 1)]]);
            (m.clone(), m)
        }
        StratumPresentation::UpperSS => {
            let m = columns(k, [&[], &[(F1, 1)], &[(E0, 1)], &[]]);
            (m.clone(), m)
        }
        StratumPresentation::LowerFamily(u) => {
            let up = u.frobenius(1).code();
            let neg = k.neg(up);
            let fm = columns(k, [&[(E1, up)], &[(E1, neg)], &[], &[(F0, up)]]);
            let vm = columns(k, [&[(E1, 1)], &[], &[], &[(E0, 1), (F0, 1)]]);
            (fm, vm)
        }
        StratumPresentation::UpperFamily(u) => {
            let up = u.frobenius(1).code();
            let neg = k.neg(up);
            let fm = columns(k, [&[], &[(F1, up)], &[(E0, up)], &[(E0, neg)]]);
            let vm = columns(k, [&[], &[(E1, 1), (F1, 1)], &[(E0, 1)], &[]]);
            (fm, vm)
        }
    };
    Ok(DieudonneModP::from_parts(k, fm, vm))
}

/// Record of dimension invariants of the underlying `(F, V)`-module,
/// forgetting the Π-action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FvFingerprint {
    pub dim_ker_f: usize,
    pub dim_ker_v: usize,
    pub dim_im_sum: usize,
    pub dim_im_intersection: usize,
    pub v_squared_zero: bool,
    pub dim_ker_intersection: usize,
}

/// How [`delta_iso_exists`] searches for an isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every Π-commuting, grading-preserving linear map.
    Exhaustive { budget: u64 },
    /// Only `φ = a·id + b·N` with `a ∈ F_p^×`, `b ∈ k`, and `N` one of the two
    /// nilpotent shapes `f1 ↦ e1` or `f0 ↦ e0`.
    StructuredForm,
}

impl SearchMode {
    pub fn exhaustive() -> Self {
        SearchMode::Exhaustive { budget: DEFAULT_SEARCH_BUDGET }
    }
}

impl DieudonneModP {
    fn from_parts(field: &GaloisField, fm: Matrix, vm: Matrix) -> Self {
        DieudonneModP {
            field: field.clone(),
            f: SemilinearMap::new(fm, 1),
            v: SemilinearMap::new(vm, -1),
            pi: SemilinearMap::new(pi_matrix(field), 0),
        }
    }

    /// Builds a module from the matrices of F and V (Π is fixed), checking
    /// every structural invariant.
    pub fn new(field: &GaloisField, f: Matrix, v: Matrix) -> Result<Self> {
        for m in [&f, &v] {
            if m.rows() != 4 || m.cols() != 4 {
                return Err(Error::DimensionMismatch { expected: 4, got: m.rows().max(m.cols()) });
            }
            if m.field() != field {
                return Err(Error::ParentMismatch);
            }
        }
        let d = Self::from_parts(field, f, v);
        let bad = d.invariant_violations();
        if !bad.is_empty() {
            return Err(Error::Precondition(bad.join("; ")));
        }
        Ok(d)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn f(&self) -> &SemilinearMap {
        &self.f
    }

    pub fn v(&self) -> &SemilinearMap {
        &self.v
    }

    pub fn pi(&self) -> &SemilinearMap {
        &self.pi
    }

    /// Names of the structural invariants that fail, empty when well formed.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let zero = |m: &SemilinearMap| m.is_zero();
        let c = |a: &SemilinearMap, b: &SemilinearMap| a.compose(b).expect("4x4 maps compose");
        if !zero(&c(&self.pi, &self.pi)) {
            bad.push("Pi^2 != 0".to_string());
        }
        if !zero(&c(&self.f, &self.v)) {
            bad.push("FV != 0".to_string());
        }
        if !zero(&c(&self.v, &self.f)) {
            bad.push("VF != 0".to_string());
        }
        if c(&self.f, &self.pi).matrix != c(&self.pi, &self.f).matrix {
            bad.push("F does not commute with Pi".to_string());
        }
        if c(&self.v, &self.pi).matrix != c(&self.pi, &self.v).matrix {
            bad.push("V does not commute with Pi".to_string());
        }
        for (name, m) in [("F", &self.f.matrix), ("V", &self.v.matrix)] {
            let swaps = (0..4).all(|col| {
                (0..4).all(|row| m.get(row, col) == 0 || component(row) != component(col))
            });
            if !swaps {
                bad.push(format!("{name} does not swap the grading"));
            }
        }
        // exactness of the mod-p sequences: ker F = im V and ker V = im F
        let fp = self.fingerprint();
        let rank_f = 4 - fp.dim_ker_f;
        let rank_v = 4 - fp.dim_ker_v;
        if fp.dim_ker_f != rank_v || fp.dim_ker_v != rank_f {
            bad.push("ker F != im V or ker V != im F".to_string());
        }
        bad
    }

    /// `V² = 0`.
    pub fn is_superspecial_v2(&self) -> bool {
        self.v.compose(&self.v).expect("4x4 maps compose").is_zero()
    }

    /// `F(D) = V(D)`. Images of semilinear maps are column spaces because
    /// Frobenius permutes coordinate vectors.
    pub fn is_superspecial_fv(&self) -> bool {
        let (rf, rv) = (self.f.matrix.rank(), self.v.matrix.rank());
        let sum = self.f.matrix.hstack(&self.v.matrix).expect("same shape").rank();
        rf == rv && rv == sum
    }

    pub fn fingerprint(&self) -> FvFingerprint {
        let k = &self.field;
        let rf = self.f.matrix.rank();
        let rv = self.v.matrix.rank();
        let sum = self.f.matrix.hstack(&self.v.matrix).expect("same shape").rank();
        // ker F = σ⁻¹(ker M_F), ker V = σ(ker M_V)
        let ker_f: Vec<Vec<u32>> = self
            .f
            .matrix
            .kernel()
            .into_iter()
            .map(|v| v.into_iter().map(|x| k.frob(x, -1)).collect())
            .collect();
        let ker_v: Vec<Vec<u32>> = self
            .v
            .matrix
            .kernel()
            .into_iter()
            .map(|v| v.into_iter().map(|x| k.frob(x, 1)).collect())
            .collect();
        let span = |vs: &[Vec<u32>]| {
            if vs.is_empty() {
                0
            } else {
                Matrix::from_columns(k, vs).rank()
            }
        };
        let both: Vec<Vec<u32>> = ker_f.iter().chain(&ker_v).cloned().collect();
        let ker_int = ker_f.len() + ker_v.len() - span(&both);
        FvFingerprint {
            dim_ker_f: 4 - rf,
            dim_ker_v: 4 - rv,
            dim_im_sum: sum,
            dim_im_intersection: rf + rv - sum,
            v_squared_zero: self.is_superspecial_v2(),
            dim_ker_intersection: ker_int,
        }
    }

    /// The module transported along an invertible Δ-linear map `φ`:
    /// `F' = φ F φ⁻¹`, `V' = φ V φ⁻¹`.
    pub fn transport(&self, phi: &Matrix) -> Result<DieudonneModP> {
        let inv = phi
            .inverse()
            .ok_or_else(|| Error::Precondition("transport map is not invertible".into()))?;
        let phi = SemilinearMap::new(phi.clone(), 0);
        let inv = SemilinearMap::new(inv, 0);
        let f = phi.compose(&self.f)?.compose(&inv)?;
        let v = phi.compose(&self.v)?.compose(&inv)?;
        Ok(DieudonneModP::from_parts(&self.field, f.matrix, v.matrix))
    }

    /// Same module with scalars extended along a field embedding.
    pub fn base_change(&self, emb: &crate::resfield::Embedding) -> DieudonneModP {
        let t = emb.target();
        let lift = |m: &Matrix| {
            let mut out = Matrix::zero(t, 4, 4);
            for r in 0..4 {
                for c in 0..4 {
                    out.set(r, c, emb.apply(&m.entry(r, c)).code());
                }
            }
            out
        };
        DieudonneModP::from_parts(t, lift(&self.f.matrix), lift(&self.v.matrix))
    }

    pub fn to_json(&self) -> ModuleJson {
        let rows = |m: &Matrix| -> Vec<Vec<String>> {
            (0..4)
                .map(|r| (0..4).map(|c| m.entry(r, c).to_string()).collect())
                .collect()
        };
        ModuleJson {
            p: self.field.p(),
            m: self.field.m(),
            f: rows(&self.f.matrix),
            v: rows(&self.v.matrix),
            pi: rows(&self.pi.matrix),
        }
    }

    /// Parses the JSON form `{p, m, F, V, Pi}` over the seed-0 field `F_{p^m}`.
    /// `Pi` must be the fixed matrix.
    pub fn from_json(text: &str) -> Result<DieudonneModP> {
        let j: ModuleJson =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("module JSON: {e}")))?;
        let field = GaloisField::new(u64::from(j.p), j.m, 0)?;
        let parse = |rows: &[Vec<String>]| -> Result<Matrix> {
            if rows.len() != 4 {
                return Err(Error::DimensionMismatch { expected: 4, got: rows.len() });
            }
            let mut out = Vec::new();
            for row in rows {
                if row.len() != 4 {
                    return Err(Error::DimensionMismatch { expected: 4, got: row.len() });
                }
                let codes = row
                    .iter()
                    .map(|s| field.parse_element(s).map(|x| x.code()))
                    .collect::<Result<Vec<u32>>>()?;
                out.push(codes);
            }
            Matrix::from_rows(&field, &out)
        };
        let (f, v, pi) = (parse(&j.f)?, parse(&j.v)?, parse(&j.pi)?);
        if pi != pi_matrix(&field) {
            return Err(Error::Precondition("Pi must be the standard matrix".into()));
        }
        DieudonneModP::new(&field, f, v)
    }
}

fn component(i: usize) -> usize {
    usize::from(i >= E1)
}

/// JSON form of a module, entries written as polynomials in `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub p: u32,
    pub m: u32,
    #[serde(rename = "F")]
    pub f: Vec<Vec<String>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<String>>,
    #[serde(rename = "Pi")]
    pub pi: Vec<Vec<String>>,
}

impl Serialize for DieudonneModP {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// The Π-commuting, grading-preserving map
/// `e0 ↦ a0 e0`, `f0 ↦ c0 e0 + a1 f0`, `e1 ↦ a1 e1`, `f1 ↦ c1 e1 + a0 f1`.
///
/// These are exactly the Δ-linear endomorphisms: commuting with Π forces this
/// shape on graded maps, and a map exchanging the components cannot be
/// Δ-linear because the two embeddings of `Z_{p²}` differ.
pub fn delta_map(field: &GaloisField, a0: u32, a1: u32, c0: u32, c1: u32) -> Matrix {
    let mut m = Matrix::zero(field, 4, 4);
    m.set(E0, E0, a0);
    m.set(E0, F0, c0);
    m.set(F0, F0, a1);
    m.set(E1, E1, a1);
    m.set(E1, F1, c1);
    m.set(F1, F1, a0);
    m
}

/// A uniformly random invertible Δ-linear map.
pub fn random_delta_automorphism<R: Rng + ?Sized>(field: &GaloisField, rng: &mut R) -> Matrix {
    let a0 = field.random_unit(rng).code();
    let a1 = field.random_unit(rng).code();
    let c0 = field.random(rng).code();
    let c1 = field.random(rng).code();
    delta_map(field, a0, a1, c0, c1)
}

type Dense = [[u32; 4]; 4];

fn dense(m: &Matrix) -> Dense {
    let mut out = [[0u32; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = m.get(r, c);
        }
    }
    out
}

/// Entries of [`delta_map`] as a dense array.
fn delta_dense(a0: u32, a1: u32, c0: u32, c1: u32) -> Dense {
    let mut m = [[0u32; 4]; 4];
    m[E0][E0] = a0;
    m[E0][F0] = c0;
    m[F0][F0] = a1;
    m[E1][E1] = a1;
    m[E1][F1] = c1;
    m[F1][F1] = a0;
    m
}

/// Dense data of a pair of modules for the candidate loop.
struct Search<'a> {
    k: &'a GaloisField,
    f1: Dense,
    v1: Dense,
    f2: Dense,
    v2: Dense,
}

impl Search<'_> {
    fn entry(&self, a: &Dense, b: &Dense, r: usize, c: usize) -> u32 {
        (0..4).fold(0, |acc, j| self.k.add(acc, self.k.mul(a[r][j], b[j][c])))
    }

    /// `Φ F1 = F2 σ(Φ)` and `Φ V1 = V2 σ⁻¹(Φ)` for `Φ = delta_map(a0, a1, c0, c1)`,
    /// stopping at the first differing entry.
    fn intertwines(&self, a0: u32, a1: u32, c0: u32, c1: u32) -> bool {
        let k = self.k;
        let phi = delta_dense(a0, a1, c0, c1);
        let twist = |i| delta_dense(k.frob(a0, i), k.frob(a1, i), k.frob(c0, i), k.frob(c1, i));
        let (up, down) = (twist(1), twist(-1));
        (0..4).all(|r| {
            (0..4).all(|c| {
                self.entry(&phi, &self.f1, r, c) == self.entry(&self.f2, &up, r, c)
                    && self.entry(&phi, &self.v1, r, c) == self.entry(&self.v2, &down, r, c)
            })
        })
    }
}

/// Searches for a Δ-linear isomorphism `D1 → D2` intertwining F and V.
/// Candidates are tried in a fixed order; the first success is the witness.
pub fn delta_iso_exists(
    d1: &DieudonneModP,
    d2: &DieudonneModP,
    mode: SearchMode,
) -> Result<Option<Matrix>> {
    if d1.field != d2.field {
        return Err(Error::ParentMismatch);
    }
    let k = &d1.field;
    let search = Search {
        k,
        f1: dense(&d1.f.matrix),
        v1: dense(&d1.v.matrix),
        f2: dense(&d2.f.matrix),
        v2: dense(&d2.v.matrix),
    };
    let found = |params: (u32, u32, u32, u32)| {
        let (a0, a1, c0, c1) = params;
        search.intertwines(a0, a1, c0, c1).then(|| delta_map(k, a0, a1, c0, c1))
    };
    let q = k.order();
    match mode {
        SearchMode::Exhaustive { budget } => {
            let candidates = u64::from(q).pow(4);
            if candidates > budget {
                return Err(Error::BudgetExceeded { candidates, budget });
            }
            for a0 in 1..q {
                for a1 in 1..q {
                    for c0 in 0..q {
                        for c1 in 0..q {
                            if let Some(w) = found((a0, a1, c0, c1)) {
                                return Ok(Some(w));
                            }
                        }
                    }
                }
            }
            Ok(None)
        }
        SearchMode::StructuredForm => {
            for a in 1..k.p() {
                for b in 0..q {
                    for params in [(a, a, 0, b), (a, a, b, 0)] {
                        if let Some(w) = found(params) {
                            return Ok(Some(w));
                        }
                    }
                }
            }
            Ok(None)
        }
    }
}

/// Free-function form of [`DieudonneModP::is_superspecial_v2`].
pub fn is_superspecial_v2(d: &DieudonneModP) -> bool {
    d.is_superspecial_v2()
}

/// Free-function form of [`DieudonneModP::is_superspecial_fv`].
pub fn is_superspecial_fv(d: &DieudonneModP) -> bool {
    d.is_superspecial_fv()
}

/// Free-function form of [`DieudonneModP::fingerprint`].
pub fn fv_fingerprint(d: &DieudonneModP) -> FvFingerprint {
    d.fingerprint()
}

/// A random module isomorphic to one of the five normal forms, presented in
/// a random Δ-compatible basis.
pub fn random_module<R: Rng + ?Sized>(field: &GaloisField, rng: &mut R) -> DieudonneModP {
    let u = field.random_unit(rng);
    let label = match rng.gen_range(0..5) {
        0 => StratumPresentation::MiddleSS,
        1 => StratumPresentation::LowerSS,
        2 => StratumPresentation::UpperSS,
        3 => StratumPresentation::LowerFamily(u),
        _ => StratumPresentation::UpperFamily(u),
    };
    let base = presentation(&label, field).expect("u is a unit");
    base.transport(&random_delta_automorphism(field, rng))
        .expect("automorphism is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resfield::ff_make;

    fn f9() -> GaloisField {
        ff_make(3, 2, 0).unwrap()
    }

    fn all_labels(k: &GaloisField) -> Vec<StratumPresentation> {
        let u = k.generator();
        vec![
            StratumPresentation::MiddleSS,
            StratumPresentation::LowerSS,
            StratumPresentation::UpperSS,
            StratumPresentation::LowerFamily(u.clone()),
            StratumPresentation::UpperFamily(u),
        ]
    }

    #[test]
    fn presentations_are_well_formed() {
        let k = f9();
        for label in all_labels(&k) {
            let d = presentation(&label, &k).unwrap();
            assert!(d.invariant_violations().is_empty(), "{label}: {:?}", d.invariant_violations());
            assert_eq!(d.is_superspecial_v2(), label.is_superspecial());
            assert_eq!(d.is_superspecial_fv(), label.is_superspecial());
        }
        assert_eq!(
            presentation(&StratumPresentation::LowerFamily(k.zero()), &k).unwrap_err(),
            Error::ZeroU
        );
    }

    #[test]
    fn lower_family_table_with_unit_parameter() {
        let k = ff_make(3, 1, 0).unwrap();
        let d = presentation(&StratumPresentation::LowerFamily(k.one()), &k).unwrap();
        assert_eq!(d.v().matrix.column(F1), vec![1, 1, 0, 0]);
        assert_eq!(d.f().matrix.column(E0), vec![0, 0, 1, 0]);
        assert_eq!(d.f().matrix.column(F0), vec![0, 0, 2, 0]);
    }

    #[test]
    fn zero_module_is_superspecial() {
        let k = f9();
        let z = DieudonneModP::from_parts(&k, Matrix::zero(&k, 4, 4), Matrix::zero(&k, 4, 4));
        assert!(z.is_superspecial_v2());
        assert!(z.is_superspecial_fv());
    }

    #[test]
    fn fingerprints() {
        let k = f9();
        let fp = |l: StratumPresentation| presentation(&l, &k).unwrap().fingerprint();
        let mid = fp(StratumPresentation::MiddleSS);
        assert_eq!(mid, fp(StratumPresentation::LowerSS));
        assert_eq!(mid, fp(StratumPresentation::UpperSS));
        let lo = fp(StratumPresentation::LowerFamily(k.one()));
        assert_eq!(lo, fp(StratumPresentation::LowerFamily(k.generator())));
        assert_ne!(mid, lo);
        assert!(mid.v_squared_zero && !lo.v_squared_zero);
    }

    #[test]
    fn iso_search() {
        let k = f9();
        let u = k.generator();
        let lf = |u: &FFElement| presentation(&StratumPresentation::LowerFamily(u.clone()), &k).unwrap();
        let w = delta_iso_exists(&lf(&u), &lf(&u), SearchMode::exhaustive()).unwrap().unwrap();
        assert_eq!(w, Matrix::identity(&k, 4));
        assert!(delta_iso_exists(&lf(&u), &lf(&u.pow(2)), SearchMode::exhaustive()).unwrap().is_none());
        let mid = presentation(&StratumPresentation::MiddleSS, &k).unwrap();
        let low = presentation(&StratumPresentation::LowerSS, &k).unwrap();
        assert!(delta_iso_exists(&mid, &low, SearchMode::exhaustive()).unwrap().is_none());
        let big = ff_make(3, 4, 0).unwrap();
        let m81 = presentation(&StratumPresentation::MiddleSS, &big).unwrap();
        assert!(matches!(
            delta_iso_exists(&m81, &m81, SearchMode::exhaustive()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn transported_modules_stay_isomorphic() {
        use rand::SeedableRng;
        let k = f9();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for label in all_labels(&k) {
            let d = presentation(&label, &k).unwrap();
            let moved = d.transport(&random_delta_automorphism(&k, &mut rng)).unwrap();
            assert!(moved.invariant_violations().is_empty());
            assert!(delta_iso_exists(&d, &moved, SearchMode::exhaustive()).unwrap().is_some());
        }
    }

    #[test]
    fn json_round_trip() {
        let k = f9();
        let d = presentation(&StratumPresentation::UpperFamily(k.generator()), &k).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(DieudonneModP::from_json(&text).unwrap(), d);
        assert!(DieudonneModP::from_json("{}").is_err());
    }
}
