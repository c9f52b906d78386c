//! Structured dictionary classes 𝔇: samplers, membership validators,
//! covering-number constants (h, C), and restricted-isometry quantities.
//!
//! The class metric everywhere is the 1→2 operator norm, i.e. the maximum
//! column ℓ2 norm ([`op_norm_1to2`]). Covering numbers are bounded as
//! N(𝔇, ε) ≤ (C/ε)^h with the per-class (h, C) of [`covering_constants`].

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::penalty::{PenaltyKind, PenaltySpec};

/// Enumeration budget for exhaustive support scans in [`delta_k`].
pub const DELTA_K_BUDGET: u128 = 1_000_000;

/// An m×d real matrix whose columns are the atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DMatrix<f64>", into = "DMatrix<f64>")]
pub struct Dictionary {
    mat: DMatrix<f64>,
}

impl Dictionary {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.ncols() == 0 {
            return Err(Error::Config("dictionary must be non-empty".into()));
        }
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("dictionary entries must be finite".into()));
        }
        Ok(Dictionary { mat })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    /// (signal dim m, number of atoms d)
    pub fn shape(&self) -> (usize, usize) {
        (self.mat.nrows(), self.mat.ncols())
    }

    pub fn atom(&self, j: usize) -> DVector<f64> {
        self.mat.column(j).into_owned()
    }
}

impl TryFrom<DMatrix<f64>> for Dictionary {
    type Error = Error;
    fn try_from(mat: DMatrix<f64>) -> Result<Self> {
        Dictionary::new(mat)
    }
}

impl From<Dictionary> for DMatrix<f64> {
    fn from(d: Dictionary) -> Self {
        d.mat
    }
}

/// Max column ℓ2 norm: the ‖·‖_{1→2} operator norm used as the dictionary
/// metric throughout.
pub fn op_norm_1to2(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols()).fold(0.0f64, |acc, j| acc.max(m.column(j).norm()))
}

/// Dimensions of one Kronecker factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDims {
    pub m: usize,
    pub d: usize,
}

/// Lower-RIP membership filter: δ_k(D) ≤ δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LripFilter {
    pub k: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ClassKind {
    /// Unit ℓ2-norm columns: a product of (m−1)-spheres.
    UnitNorm { m: usize, d: usize },
    /// Columns in the unit ℓ2 ball. Same covering constants as `UnitNorm`.
    Ball { m: usize, d: usize },
    /// Special orthogonal group: DᵀD = I, det D = +1.
    Orthogonal { d: usize },
    /// Orthonormal columns of a tall matrix, d ≤ m.
    Stiefel { m: usize, d: usize },
    /// Kronecker products of unit-norm dictionaries.
    Separable { factors: Vec<FactorDims> },
    /// Kronecker products of Stiefel matrices.
    StiefelTensor { factors: Vec<FactorDims> },
    /// Atoms Θ·v with v s-sparse of unit norm, Θ a fixed orthogonal base.
    SparseDict {
        m: usize,
        d: usize,
        s: usize,
        base: DMatrix<f64>,
    },
    /// Non-negative atoms with unit ℓ1 norm (columns on the simplex).
    NmfSimplex { m: usize, d: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClassSpecRepr", into = "ClassSpecRepr")]
pub struct DictionaryClassSpec {
    kind: ClassKind,
    lrip: Option<LripFilter>,
}

#[derive(Serialize, Deserialize)]
struct ClassSpecRepr {
    #[serde(flatten)]
    kind: ClassKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lrip: Option<LripFilter>,
}

impl TryFrom<ClassSpecRepr> for DictionaryClassSpec {
    type Error = Error;
    fn try_from(repr: ClassSpecRepr) -> Result<Self> {
        DictionaryClassSpec::with_lrip(repr.kind, repr.lrip)
    }
}

impl From<DictionaryClassSpec> for ClassSpecRepr {
    fn from(spec: DictionaryClassSpec) -> Self {
        ClassSpecRepr {
            kind: spec.kind,
            lrip: spec.lrip,
        }
    }
}

impl DictionaryClassSpec {
    pub fn new(kind: ClassKind) -> Result<Self> {
        Self::with_lrip(kind, None)
    }

    pub fn with_lrip(kind: ClassKind, lrip: Option<LripFilter>) -> Result<Self> {
        match &kind {
            ClassKind::UnitNorm { m, d } | ClassKind::Ball { m, d } | ClassKind::NmfSimplex { m, d } => {
                check_dims(*m, *d)?;
            }
            ClassKind::Orthogonal { d } => check_dims(*d, *d)?,
            ClassKind::Stiefel { m, d } => {
                check_dims(*m, *d)?;
                if d > m {
                    return Err(Error::Config(format!("Stiefel needs d ≤ m, got {m}×{d}")));
                }
            }
            ClassKind::Separable { factors } | ClassKind::StiefelTensor { factors } => {
                if factors.is_empty() {
                    return Err(Error::Config("tensor class needs at least one factor".into()));
                }
                for f in factors {
                    check_dims(f.m, f.d)?;
                    if matches!(kind, ClassKind::StiefelTensor { .. }) && f.d > f.m {
                        return Err(Error::Config(format!(
                            "Stiefel factor needs d ≤ m, got {}×{}",
                            f.m, f.d
                        )));
                    }
                }
            }
            ClassKind::SparseDict { m, d, s, base } => {
                check_dims(*m, *d)?;
                if *s == 0 || s > m {
                    return Err(Error::Config(format!("sparse dict needs 1 ≤ s ≤ m, got s={s}")));
                }
                if base.nrows() != *m || base.ncols() != *m {
                    return Err(Error::Config(format!(
                        "base must be {m}×{m}, got {}×{}",
                        base.nrows(),
                        base.ncols()
                    )));
                }
                let gram = base.transpose() * base;
                let dev = max_abs_dev_from_identity(&gram);
                if dev > 1e-10 {
                    return Err(Error::Config(format!(
                        "base must be orthogonal; ‖ΘᵀΘ − I‖_max = {dev:.3e}"
                    )));
                }
            }
        }
        if let Some(f) = &lrip {
            let (m, d) = ambient_of(&kind);
            if f.k == 0 || f.k > m.min(d) {
                return Err(Error::Config(format!(
                    "lrip filter needs 1 ≤ k ≤ min(m,d) = {}, got {}",
                    m.min(d),
                    f.k
                )));
            }
            if !(f.delta > 0.0 && f.delta < 1.0) {
                return Err(Error::Config(format!(
                    "lrip filter needs 0 < δ < 1, got {}",
                    f.delta
                )));
            }
        }
        Ok(DictionaryClassSpec { kind, lrip })
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn lrip(&self) -> Option<LripFilter> {
        self.lrip
    }

    /// Ambient (m, d) of class members.
    pub fn ambient_shape(&self) -> (usize, usize) {
        ambient_of(&self.kind)
    }

    /// Whether the class is convex (assumption B4 candidates).
    pub fn is_convex(&self) -> bool {
        self.lrip.is_none()
            && matches!(self.kind, ClassKind::Ball { .. } | ClassKind::NmfSimplex { .. })
    }

    /// Per-class covering constants (h, C) with N(𝔇, ε) ≤ (C/ε)^h.
    pub fn covering_constants(&self) -> (u64, f64) {
        const STIEFEL_C: f64 = 3.0 * std::f64::consts::PI * 23.140_692_632_779_267; // 3πe^π
        match &self.kind {
            ClassKind::UnitNorm { m, d } | ClassKind::Ball { m, d } | ClassKind::NmfSimplex { m, d } => {
                ((m * d) as u64, 3.0)
            }
            ClassKind::Orthogonal { d } => ((d * (d - 1) / 2) as u64, STIEFEL_C),
            ClassKind::Stiefel { m, d } => ((m * d - d * (d + 1) / 2) as u64, STIEFEL_C),
            ClassKind::Separable { factors } => {
                (factors.iter().map(|f| (f.m * f.d) as u64).sum(), 3.0)
            }
            ClassKind::StiefelTensor { factors } => (
                factors
                    .iter()
                    .map(|f| (f.m * f.d - f.d * (f.d + 1) / 2) as u64)
                    .sum(),
                STIEFEL_C,
            ),
            ClassKind::SparseDict { m, d, s, .. } => {
                let c = 3.0 * (binomial(*m, *s) as f64).powf(1.0 / *s as f64);
                ((s * d) as u64, c)
            }
        }
    }

    /// Draw a member of the class. Output passes `validate` at 1e−10.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Dictionary> {
        // With an lrip filter, rejection-sample on δ_k.
        let attempts = if self.lrip.is_some() { 200 } else { 1 };
        for _ in 0..attempts {
            let mat = self.sample_unfiltered(rng)?;
            if let Some(f) = self.lrip {
                let cand = Dictionary::new(mat)?;
                if delta_k(&cand, f.k)? <= f.delta {
                    return Ok(cand);
                }
            } else {
                return Dictionary::new(mat);
            }
        }
        Err(Error::Refusal(
            "could not sample a dictionary passing the lrip filter in 200 attempts".into(),
        ))
    }

    fn sample_unfiltered<R: Rng>(&self, rng: &mut R) -> Result<DMatrix<f64>> {
        let mat = match &self.kind {
            ClassKind::UnitNorm { m, d } => unit_norm_matrix(*m, *d, rng),
            ClassKind::Ball { m, d } => {
                let mut mat = unit_norm_matrix(*m, *d, rng);
                for j in 0..*d {
                    let u: f64 = rng.random();
                    let radius = u.powf(1.0 / *m as f64);
                    mat.column_mut(j).scale_mut(radius);
                }
                mat
            }
            ClassKind::Orthogonal { d } => {
                let mut q = orthonormal_columns(*d, *d, rng);
                if q.determinant() < 0.0 {
                    let last = q.ncols() - 1;
                    q.column_mut(last).neg_mut();
                }
                q
            }
            ClassKind::Stiefel { m, d } => orthonormal_columns(*m, *d, rng),
            ClassKind::Separable { factors } => {
                let mut mat = unit_norm_matrix(factors[0].m, factors[0].d, rng);
                for f in &factors[1..] {
                    mat = mat.kronecker(&unit_norm_matrix(f.m, f.d, rng));
                }
                mat
            }
            ClassKind::StiefelTensor { factors } => {
                let mut mat = orthonormal_columns(factors[0].m, factors[0].d, rng);
                for f in &factors[1..] {
                    mat = mat.kronecker(&orthonormal_columns(f.m, f.d, rng));
                }
                mat
            }
            ClassKind::SparseDict { m, d, s, base } => {
                let mut mat = DMatrix::zeros(*m, *d);
                for j in 0..*d {
                    let mut support: Vec<usize> = index::sample(rng, *m, *s).into_vec();
                    support.sort_unstable();
                    let mut vals: Vec<f64> = (0..*s).map(|_| rng.sample(StandardNormal)).collect();
                    let norm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm < 1e-300 {
                        vals = vec![1.0; *s];
                        let n = (*s as f64).sqrt();
                        vals.iter_mut().for_each(|v| *v /= n);
                    } else {
                        vals.iter_mut().for_each(|v| *v /= norm);
                    }
                    let mut sparse = DVector::zeros(*m);
                    for (idx, v) in support.iter().zip(&vals) {
                        sparse[*idx] = *v;
                    }
                    mat.set_column(j, &(base * sparse));
                }
                mat
            }
            ClassKind::NmfSimplex { m, d } => {
                // Dirichlet(1,…,1) columns via normalized Exp(1) draws.
                let mut mat = DMatrix::zeros(*m, *d);
                for j in 0..*d {
                    let mut col = DVector::zeros(*m);
                    loop {
                        let mut sum = 0.0;
                        for i in 0..*m {
                            let u: f64 = rng.random();
                            let e = -(1.0 - u).ln();
                            col[i] = e;
                            sum += e;
                        }
                        if sum > 1e-300 {
                            col.scale_mut(1.0 / sum);
                            break;
                        }
                    }
                    mat.set_column(j, &col);
                }
                mat
            }
        };
        Ok(mat)
    }

    /// Check all class constraints within `tol`. Shape mismatches are
    /// contract violations (an error, not a report).
    pub fn validate(&self, dict: &Dictionary, tol: f64) -> Result<ValidationReport> {
        let (m, d) = self.ambient_shape();
        if dict.shape() != (m, d) {
            return Err(Error::DimMismatch(format!(
                "dictionary is {:?}, class expects ({m}, {d})",
                dict.shape()
            )));
        }
        let mut violations = Vec::new();
        let mat = dict.matrix();
        match &self.kind {
            ClassKind::UnitNorm { .. } => check_column_norms(mat, tol, &mut violations),
            ClassKind::Ball { .. } => {
                for j in 0..d {
                    let n = mat.column(j).norm();
                    if n > 1.0 + tol {
                        violations.push(format!("column {j}: norm {n} exceeds 1 + tol"));
                    }
                }
            }
            ClassKind::Orthogonal { .. } => {
                check_orthonormal(mat, tol, &mut violations);
                let det = mat.determinant();
                if (det - 1.0).abs() > tol.max(1e-12) {
                    violations.push(format!("determinant {det} differs from +1"));
                }
            }
            ClassKind::Stiefel { .. } => check_orthonormal(mat, tol, &mut violations),
            ClassKind::Separable { factors } => {
                check_column_norms(mat, tol, &mut violations);
                check_kron_chain(mat, factors, tol, &mut violations);
            }
            ClassKind::StiefelTensor { factors } => {
                check_orthonormal(mat, tol, &mut violations);
                check_kron_chain(mat, factors, tol, &mut violations);
            }
            ClassKind::SparseDict { s, base, .. } => {
                let coeffs = base.transpose() * mat;
                for j in 0..d {
                    let col = coeffs.column(j);
                    let nnz = col.iter().filter(|v| v.abs() > tol).count();
                    if nnz > *s {
                        violations.push(format!(
                            "column {j}: {nnz} entries above tol in the base frame, budget is {s}"
                        ));
                    }
                    let n = col.norm();
                    if (n - 1.0).abs() > tol {
                        violations.push(format!("column {j}: norm {n} differs from 1"));
                    }
                }
            }
            ClassKind::NmfSimplex { .. } => {
                for j in 0..d {
                    let col = mat.column(j);
                    if let Some((i, v)) = col
                        .iter()
                        .enumerate()
                        .find(|(_, v)| **v < -tol)
                        .map(|(i, v)| (i, *v))
                    {
                        violations.push(format!("column {j}: negative entry {v} at row {i}"));
                    }
                    let l1: f64 = col.iter().map(|v| v.abs()).sum();
                    if (l1 - 1.0).abs() > tol {
                        violations.push(format!("column {j}: ℓ1 norm {l1} differs from 1"));
                    }
                }
            }
        }
        if let Some(f) = self.lrip {
            let dk = delta_k(dict, f.k)?;
            if dk > f.delta + tol {
                violations.push(format!("δ_{}(D) = {dk} exceeds the lrip bound {}", f.k, f.delta));
            }
        }
        Ok(ValidationReport {
            ok: violations.is_empty(),
            violations,
        })
    }

    /// Project an arbitrary matrix onto the class. `fallback` supplies atoms
    /// for degenerate columns (e.g. a zero column cannot be normalized).
    /// Supported: UnitNorm, Ball, Orthogonal, Stiefel, NmfSimplex.
    pub fn project(&self, mat: &DMatrix<f64>, fallback: Option<&Dictionary>) -> Result<Dictionary> {
        let (m, d) = self.ambient_shape();
        if (mat.nrows(), mat.ncols()) != (m, d) {
            return Err(Error::DimMismatch(format!(
                "matrix is {}×{}, class expects {m}×{d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let out = match &self.kind {
            ClassKind::UnitNorm { .. } => {
                let mut out = mat.clone();
                for j in 0..d {
                    let n = out.column(j).norm();
                    if n < 1e-12 {
                        match fallback {
                            Some(f) => out.set_column(j, &f.matrix().column(j)),
                            None => {
                                let mut e = DVector::zeros(m);
                                e[0] = 1.0;
                                out.set_column(j, &e);
                            }
                        }
                    } else {
                        out.column_mut(j).scale_mut(1.0 / n);
                    }
                }
                out
            }
            ClassKind::Ball { .. } => {
                let mut out = mat.clone();
                for j in 0..d {
                    let n = out.column(j).norm();
                    if n > 1.0 {
                        out.column_mut(j).scale_mut(1.0 / n);
                    }
                }
                out
            }
            ClassKind::Stiefel { .. } => qr_orthonormalize(mat),
            ClassKind::Orthogonal { .. } => {
                let mut q = qr_orthonormalize(mat);
                if q.determinant() < 0.0 {
                    let last = q.ncols() - 1;
                    q.column_mut(last).neg_mut();
                }
                q
            }
            ClassKind::NmfSimplex { .. } => {
                let mut out = mat.clone();
                for j in 0..d {
                    let col = project_onto_simplex(&out.column(j).into_owned());
                    out.set_column(j, &col);
                }
                out
            }
            other => {
                return Err(Error::Refusal(format!(
                    "no projection implemented for class {other:?}"
                )))
            }
        };
        Dictionary::new(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

fn check_dims(m: usize, d: usize) -> Result<()> {
    if m == 0 || d == 0 {
        Err(Error::Config("dimensions must be ≥ 1".into()))
    } else {
        Ok(())
    }
}

fn ambient_of(kind: &ClassKind) -> (usize, usize) {
    match kind {
        ClassKind::UnitNorm { m, d }
        | ClassKind::Ball { m, d }
        | ClassKind::NmfSimplex { m, d }
        | ClassKind::SparseDict { m, d, .. } => (*m, *d),
        ClassKind::Orthogonal { d } => (*d, *d),
        ClassKind::Stiefel { m, d } => (*m, *d),
        ClassKind::Separable { factors } | ClassKind::StiefelTensor { factors } => (
            factors.iter().map(|f| f.m).product(),
            factors.iter().map(|f| f.d).product(),
        ),
    }
}

fn check_column_norms(mat: &DMatrix<f64>, tol: f64, violations: &mut Vec<String>) {
    for j in 0..mat.ncols() {
        let n = mat.column(j).norm();
        if (n - 1.0).abs() > tol {
            violations.push(format!("column {j}: norm {n} differs from 1 beyond tol"));
        }
    }
}

fn max_abs_dev_from_identity(gram: &DMatrix<f64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

fn check_orthonormal(mat: &DMatrix<f64>, tol: f64, violations: &mut Vec<String>) {
    let gram = mat.transpose() * mat;
    let dev = max_abs_dev_from_identity(&gram);
    if dev > tol {
        violations.push(format!("‖DᵀD − I‖_max = {dev:.3e} exceeds tol"));
    }
}

/// Verify that `mat` factors as a Kronecker chain with the given dims, by
/// peeling one factor at a time and testing the Van Loan rearrangement for
/// rank one.
fn check_kron_chain(
    mat: &DMatrix<f64>,
    factors: &[FactorDims],
    tol: f64,
    violations: &mut Vec<String>,
) {
    if factors.len() < 2 {
        return;
    }
    let mut rest = mat.clone();
    for (level, f) in factors[..factors.len() - 1].iter().enumerate() {
        let m2: usize = factors[level + 1..].iter().map(|g| g.m).product();
        let d2: usize = factors[level + 1..].iter().map(|g| g.d).product();
        let r = kron_rearrange(&rest, f.m, f.d, m2, d2);
        let svd = r.svd(true, true);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let s1 = sv[0];
        let s2 = sv.get(1).copied().unwrap_or(0.0);
        if s2 > tol * s1.max(1.0) {
            violations.push(format!(
                "level {level}: not a Kronecker product (σ₂/σ₁ = {:.3e})",
                s2 / s1.max(1e-300)
            ));
            return;
        }
        // Continue with the recovered right factor.
        let v = svd.v_t.expect("svd computed").row(0).transpose() * s1.sqrt();
        rest = DMatrix::from_column_slice(m2, d2, v.as_slice());
    }
}

/// Van Loan rearrangement: R[(j1·m1+i1), (j2·m2+i2)] = D[i1·m2+i2, j1·d2+j2];
/// D = A ⊗ B iff R has rank one.
fn kron_rearrange(d: &DMatrix<f64>, m1: usize, d1: usize, m2: usize, d2: usize) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(m1 * d1, m2 * d2);
    for i1 in 0..m1 {
        for j1 in 0..d1 {
            for i2 in 0..m2 {
                for j2 in 0..d2 {
                    r[(j1 * m1 + i1, j2 * m2 + i2)] = d[(i1 * m2 + i2, j1 * d2 + j2)];
                }
            }
        }
    }
    r
}

fn gaussian_matrix<R: Rng>(m: usize, d: usize, rng: &mut R) -> DMatrix<f64> {
    let mut data = Vec::with_capacity(m * d);
    for _ in 0..m * d {
        data.push(rng.sample(StandardNormal));
    }
    DMatrix::from_vec(m, d, data)
}

fn unit_norm_matrix<R: Rng>(m: usize, d: usize, rng: &mut R) -> DMatrix<f64> {
    let mut mat = DMatrix::zeros(m, d);
    for j in 0..d {
        mat.set_column(j, &unit_sphere_vector(m, rng));
    }
    mat
}

/// Uniform draw from the unit sphere in ℝ^m.
pub(crate) fn unit_sphere_vector<R: Rng>(m: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let mut v = DVector::zeros(m);
        for i in 0..m {
            v[i] = rng.sample(StandardNormal);
        }
        let n = v.norm();
        if n > 1e-150 {
            v.scale_mut(1.0 / n);
            return v;
        }
    }
}

/// QR of a Gaussian matrix with the R-diagonal sign fix, giving a Haar draw
/// with orthonormal columns.
fn orthonormal_columns<R: Rng>(m: usize, d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = gaussian_matrix(m, d, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn qr_orthonormalize(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = mat.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Euclidean projection onto the probability simplex {w ≥ 0, Σw = 1}
/// (sort-based algorithm).
pub fn project_onto_simplex(v: &DVector<f64>) -> DVector<f64> {
    let n = v.len();
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    DVector::from_fn(n, |i, _| (v[i] - theta).max(0.0))
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic enumeration of all size-k subsets of {0,…,n−1}.
pub(crate) fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Lower-RIP constant δ_k(D): the smallest δ with
/// (1−δ)‖α‖² ≤ ‖Dα‖² for all k-sparse α, clamped to [0, 1]. Exhaustive over
/// all k-column supports; refuses when binom(d, k) exceeds the budget.
pub fn delta_k(dict: &Dictionary, k: usize) -> Result<f64> {
    let (m, d) = dict.shape();
    if k == 0 || k > m.min(d) {
        return Err(Error::Config(format!(
            "delta_k needs 1 ≤ k ≤ min(m,d) = {}, got {k}",
            m.min(d)
        )));
    }
    let count = binomial(d, k);
    if count > DELTA_K_BUDGET {
        return Err(Error::Refusal(format!(
            "binom({d},{k}) = {count} supports exceed the enumeration budget {DELTA_K_BUDGET}; \
             lower k or d"
        )));
    }
    let mat = dict.matrix();
    let mut min_eig = f64::INFINITY;
    for_each_combination(d, k, |support| {
        let sub = mat.select_columns(support.iter());
        let gram = sub.transpose() * sub;
        let eigs = gram.symmetric_eigenvalues();
        let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        if lo < min_eig {
            min_eig = lo;
        }
    });
    Ok((1.0 - min_eig).clamp(0.0, 1.0))
}

/// Restricted-eigenvalue constant κ with κ‖α‖₁² ≤ ‖Dα‖₂² jointly over the
/// penalty's admissible coefficients and the class.
///
/// - k-sparse (and the zero penalty, treated as k = d): κ = (1−δ)/k, with
///   δ = 0 on orthonormal-column classes, the filter δ on lrip classes, or
///   δ_k(D) for an explicit dictionary;
/// - non-negative: κ = min_j ‖d_j‖²/d for an explicit member, or the
///   class-level floor 1/(md) on the ℓ1-normalized simplex class.
pub fn kappa_of(
    class: &DictionaryClassSpec,
    penalty: &PenaltySpec,
    dict: Option<&Dictionary>,
) -> Result<f64> {
    let (m, d) = class.ambient_shape();
    match penalty.kind() {
        PenaltyKind::KSparseIndicator { .. } | PenaltyKind::Zero => {
            let k = match penalty.kind() {
                PenaltyKind::KSparseIndicator { k } => *k,
                _ => d,
            };
            let orthonormal = matches!(
                class.kind(),
                ClassKind::Orthogonal { .. }
                    | ClassKind::Stiefel { .. }
                    | ClassKind::StiefelTensor { .. }
            );
            let delta = if orthonormal {
                0.0
            } else if let Some(f) = class.lrip() {
                if k > f.k {
                    return Err(Error::Config(format!(
                        "penalty sparsity {k} exceeds the class lrip order {}",
                        f.k
                    )));
                }
                f.delta
            } else if let Some(dict) = dict {
                delta_k(dict, k)?
            } else {
                return Err(Error::Config(
                    "k-sparse κ needs an orthonormal class, an lrip filter, or a dictionary".into(),
                ));
            };
            if delta >= 1.0 {
                return Err(Error::Config("restricted eigenvalue is zero (δ = 1)".into()));
            }
            Ok((1.0 - delta) / k as f64)
        }
        PenaltyKind::NonNegIndicator => {
            if let Some(dict) = dict {
                let mat = dict.matrix();
                if mat.iter().any(|v| *v < -1e-12) {
                    return Err(Error::Config(
                        "non-negative κ needs an entrywise non-negative dictionary".into(),
                    ));
                }
                let min_norm_sq = (0..mat.ncols())
                    .map(|j| mat.column(j).norm_squared())
                    .fold(f64::INFINITY, f64::min);
                if min_norm_sq <= 0.0 {
                    return Err(Error::Config("dictionary has a zero column".into()));
                }
                Ok(min_norm_sq / d as f64)
            } else if matches!(class.kind(), ClassKind::NmfSimplex { .. }) {
                // ‖d_j‖₂ ≥ ‖d_j‖₁/√m = 1/√m on the simplex class.
                Ok(1.0 / (m * d) as f64)
            } else {
                Err(Error::Config(
                    "class-level non-negative κ is only defined on the simplex class".into(),
                ))
            }
        }
        other => Err(Error::Config(format!(
            "penalty {other:?} satisfies the norm-like assumptions; κ does not apply"
        ))),
    }
}

/// Greedy ε-net of the unit circle (the UnitNorm(2,1) class), built over a
/// uniform angular grid. Returned points are pairwise more than ε apart, so
/// the net size is bounded by the (1+2/ε)² packing estimate.
pub fn greedy_epsilon_net_circle(eps: f64, grid_points: usize) -> Vec<[f64; 2]> {
    let mut net: Vec<[f64; 2]> = Vec::new();
    for i in 0..grid_points {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / grid_points as f64;
        let p = [theta.cos(), theta.sin()];
        let covered = net
            .iter()
            .any(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() <= eps);
        if !covered {
            net.push(p);
        }
    }
    net
}
