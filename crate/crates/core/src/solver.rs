//! Inner coding problems and the empirical cost.
//!
//! `code` computes (an upper bound on) f_x(D) = inf_α ½‖x − Dα‖² + g(α)
//! with a per-variant solver and a certificate: `Exact` for closed-form or
//! exhaustive paths, `DualityGap(g)` when a computable bound on
//! value − f_x(D) is available, `Heuristic` otherwise. Reported values are
//! always recomputed from the returned coefficients, so
//! `value = ½‖x − Dα‖² + g(α)` holds exactly and approximate solvers can
//! never report below a true optimum.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dict::Dictionary;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::penalty::{GridSpec, PenaltyKind, PenaltySpec, Regime};

/// Default duality-gap tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Iteration cap; hitting it downgrades the certificate to `Heuristic`.
pub const MAX_ITERS: usize = 100_000;
/// Support-enumeration budget for exact k-sparse coding.
pub const KSPARSE_BUDGET: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "gap")]
pub enum Certificate {
    /// The coefficients are a global minimizer (up to floating arithmetic).
    Exact,
    /// `value − f_x(D)` is at most the carried bound.
    DualityGap(f64),
    /// No optimality bound; the value is still a valid upper bound on f_x.
    Heuristic,
}

impl Certificate {
    /// Upper bound on value − f_x(D) implied by the certificate.
    pub fn gap_bound(self) -> f64 {
        match self {
            Certificate::Exact => 0.0,
            Certificate::DualityGap(g) => g,
            Certificate::Heuristic => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CodingResult {
    pub value: f64,
    pub alpha: DVector<f64>,
    pub certificate: Certificate,
    pub iterations: usize,
}

/// Solver diagnostics aggregated over the columns of a sample.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CostSummary {
    pub value: f64,
    pub max_gap: f64,
    pub gap_sum: f64,
    pub heuristic_columns: usize,
}

fn check_dims(x: &DVector<f64>, dict: &Dictionary, spec: &PenaltySpec) -> Result<()> {
    let (m, d) = dict.shape();
    if x.len() != m {
        return Err(Error::DimMismatch(format!(
            "signal has length {}, dictionary expects {m}",
            x.len()
        )));
    }
    if spec.coeff_dim() != d {
        return Err(Error::DimMismatch(format!(
            "penalty acts on ℝ^{}, dictionary has {d} atoms",
            spec.coeff_dim()
        )));
    }
    Ok(())
}

/// Recompute the objective from the final coefficients.
fn finish(
    x: &DVector<f64>,
    dict: &Dictionary,
    spec: &PenaltySpec,
    alpha: DVector<f64>,
    certificate: Certificate,
    iterations: usize,
) -> Result<CodingResult> {
    let residual = x - dict.matrix() * &alpha;
    let value = 0.5 * residual.norm_squared() + spec.eval(&alpha)?;
    if !value.is_finite() {
        return Err(Error::Config(
            "solver returned coefficients outside the penalty domain".into(),
        ));
    }
    Ok(CodingResult {
        value,
        alpha,
        certificate,
        iterations,
    })
}

/// Compute f_x(D) for one signal. `tol` is the duality-gap target of the
/// iterative solvers.
pub fn code(
    x: &DVector<f64>,
    dict: &Dictionary,
    spec: &PenaltySpec,
    tol: f64,
) -> Result<CodingResult> {
    check_dims(x, dict, spec)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let d = dict.shape().1;
    match spec.kind() {
        PenaltyKind::Zero => {
            let (alpha, iters) = least_squares(x, dict);
            finish(x, dict, spec, alpha, Certificate::Exact, iters)
        }
        PenaltyKind::KSparseIndicator { k } if *k >= d => {
            let (alpha, iters) = least_squares(x, dict);
            finish(x, dict, spec, alpha, Certificate::Exact, iters)
        }
        PenaltyKind::KSparseIndicator { k } => {
            if crate::dict::binomial(d, *k) <= KSPARSE_BUDGET {
                let (alpha, tried) = ksparse_exhaustive(x, dict, *k);
                finish(x, dict, spec, alpha, Certificate::Exact, tried)
            } else {
                let alpha = omp(x, dict, *k);
                finish(x, dict, spec, alpha, Certificate::Heuristic, *k)
            }
        }
        PenaltyKind::KMeansIndicator => {
            let (_, j) = kmeans_value(x, dict.matrix());
            let mut alpha = DVector::zeros(d);
            alpha[j] = 1.0;
            finish(x, dict, spec, alpha, Certificate::Exact, d)
        }
        PenaltyKind::LpNormPower { p, r, lambda } => match (p, *r) {
            (ExtReal::Finite(pv), rv) if *pv == 1.0 && rv == 1.0 => {
                let (alpha, cert, iters) = lasso_cd(x, dict, 1.0 / lambda, tol);
                finish(x, dict, spec, alpha, cert, iters)
            }
            (ExtReal::Finite(pv), rv) if *pv == 1.0 && rv == 2.0 => {
                let (alpha, cert, iters) = l1_squared(x, dict, *lambda, tol);
                finish(x, dict, spec, alpha, cert, iters)
            }
            _ => Err(Error::Refusal(format!(
                "no solver for LpNormPower(p={p:?}, r={r}); supported: (p=1, r=1) lasso, \
                 (p=1, r=2) squared-ℓ1"
            ))),
        },
        PenaltyKind::LpBallIndicator { p, lambda } => {
            let ball = match p {
                ExtReal::Finite(pv) if *pv == 1.0 => Ball::L1(*lambda),
                ExtReal::Finite(pv) if *pv == 2.0 => Ball::L2(*lambda),
                ExtReal::Inf => Ball::LInf(*lambda),
                _ => {
                    return Err(Error::Refusal(format!(
                        "no exact projection for the ℓp ball with p = {p:?}; supported: p ∈ {{1, 2, ∞}}"
                    )))
                }
            };
            let (alpha, cert, iters) = pg_ball_from(x, dict.matrix(), ball, tol, DVector::zeros(d), MAX_ITERS);
            let alpha = nudge_into_ball(alpha, spec);
            finish(x, dict, spec, alpha, cert, iters)
        }
        PenaltyKind::NonNegIndicator => {
            let (alpha, cert, iters) = nnls_pg(x, dict, tol);
            finish(x, dict, spec, alpha, cert, iters)
        }
    }
}

/// ½ min_j ‖x − d_j‖², ties broken toward the lowest atom index.
pub(crate) fn kmeans_value(x: &DVector<f64>, mat: &DMatrix<f64>) -> (f64, usize) {
    kmeans_value_slice(x.as_slice(), mat)
}

pub(crate) fn kmeans_value_slice(x: &[f64], mat: &DMatrix<f64>) -> (f64, usize) {
    let m = mat.nrows();
    let data = mat.as_slice();
    let mut best = f64::INFINITY;
    let mut best_j = 0;
    for j in 0..mat.ncols() {
        let col = &data[j * m..(j + 1) * m];
        let mut dist_sq = 0.0;
        for i in 0..m {
            let diff = x[i] - col[i];
            dist_sq += diff * diff;
        }
        if dist_sq < best {
            best = dist_sq;
            best_j = j;
        }
    }
    (0.5 * best, best_j)
}

/// Minimum-norm least squares, with a fast path for orthonormal columns.
fn least_squares(x: &DVector<f64>, dict: &Dictionary) -> (DVector<f64>, usize) {
    let mat = dict.matrix();
    let (m, d) = dict.shape();
    if d <= m {
        let gram = mat.transpose() * mat;
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((gram[(i, j)] - target).abs());
            }
        }
        if dev <= 1e-10 {
            return (mat.transpose() * x, 1);
        }
    }
    let svd = mat.clone().svd(true, true);
    let eps = svd.singular_values.max() * 1e-13;
    let alpha = svd.solve(x, eps).expect("svd computed with u and v");
    (alpha, 1)
}

fn ls_on_support(x: &DVector<f64>, mat: &DMatrix<f64>, support: &[usize]) -> DVector<f64> {
    let sub = mat.select_columns(support.iter());
    let svd = sub.svd(true, true);
    let eps = svd.singular_values.max().max(1e-300) * 1e-13;
    svd.solve(x, eps).expect("svd computed with u and v")
}

fn ksparse_exhaustive(x: &DVector<f64>, dict: &Dictionary, k: usize) -> (DVector<f64>, usize) {
    let mat = dict.matrix();
    let d = mat.ncols();
    let mut best_value = f64::INFINITY;
    let mut best_alpha = DVector::zeros(d);
    let mut tried = 0usize;
    crate::dict::for_each_combination(d, k, |support| {
        tried += 1;
        let coeffs = ls_on_support(x, mat, support);
        let mut alpha = DVector::zeros(d);
        for (slot, &j) in support.iter().enumerate() {
            alpha[j] = coeffs[slot];
        }
        let value = (x - mat * &alpha).norm_squared();
        if value < best_value {
            best_value = value;
            best_alpha = alpha;
        }
    });
    (best_alpha, tried)
}

/// Orthogonal matching pursuit with least-squares refitting per step.
fn omp(x: &DVector<f64>, dict: &Dictionary, k: usize) -> DVector<f64> {
    let mat = dict.matrix();
    let d = mat.ncols();
    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut residual = x.clone();
    let mut alpha = DVector::zeros(d);
    for _ in 0..k {
        let mut best_j = None;
        let mut best_corr = 0.0;
        for j in 0..d {
            if support.contains(&j) {
                continue;
            }
            let col = mat.column(j);
            let norm = col.norm();
            if norm < 1e-300 {
                continue;
            }
            let corr = (col.dot(&residual) / norm).abs();
            if corr > best_corr {
                best_corr = corr;
                best_j = Some(j);
            }
        }
        let Some(j) = best_j else { break };
        if best_corr <= 1e-15 * x.norm().max(1.0) {
            break;
        }
        support.push(j);
        support.sort_unstable();
        let coeffs = ls_on_support(x, mat, &support);
        alpha.fill(0.0);
        for (slot, &jj) in support.iter().enumerate() {
            alpha[jj] = coeffs[slot];
        }
        residual = x - mat * &alpha;
    }
    alpha
}

/// Cyclic coordinate descent on ½‖x − Dα‖² + μ‖α‖₁ with the scaled-residual
/// duality gap as the stopping rule.
fn lasso_cd(
    x: &DVector<f64>,
    dict: &Dictionary,
    mu: f64,
    tol: f64,
) -> (DVector<f64>, Certificate, usize) {
    let mat = dict.matrix();
    let d = mat.ncols();
    let col_sq: Vec<f64> = (0..d).map(|j| mat.column(j).norm_squared()).collect();
    let mut alpha = DVector::zeros(d);
    let mut residual = x.clone();
    let mut sweeps = 0usize;
    loop {
        sweeps += 1;
        for j in 0..d {
            if col_sq[j] <= 1e-300 {
                continue;
            }
            let col = mat.column(j);
            let z = col.dot(&residual) + col_sq[j] * alpha[j];
            let new = soft_threshold(z, mu) / col_sq[j];
            let delta = alpha[j] - new;
            if delta != 0.0 {
                residual += col * delta;
                alpha[j] = new;
            }
        }
        if sweeps % 256 == 0 {
            residual = x - mat * &alpha; // clear accumulated drift
        }
        let gap = lasso_gap(x, mat, &alpha, &residual, mu);
        if gap <= tol {
            return (alpha, Certificate::DualityGap(gap.max(0.0)), sweeps);
        }
        if sweeps >= MAX_ITERS {
            return (alpha, Certificate::Heuristic, sweeps);
        }
    }
}

fn soft_threshold(z: f64, mu: f64) -> f64 {
    if z > mu {
        z - mu
    } else if z < -mu {
        z + mu
    } else {
        0.0
    }
}

fn lasso_gap(
    x: &DVector<f64>,
    mat: &DMatrix<f64>,
    alpha: &DVector<f64>,
    residual: &DVector<f64>,
    mu: f64,
) -> f64 {
    let primal = 0.5 * residual.norm_squared() + mu * alpha.iter().map(|v| v.abs()).sum::<f64>();
    let corr = (mat.transpose() * residual)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if corr > mu { mu / corr } else { 1.0 };
    let theta = residual * scale;
    let dual = theta.dot(x) - 0.5 * theta.norm_squared();
    primal - dual
}

#[derive(Debug, Clone, Copy)]
enum Ball {
    L1(f64),
    L2(f64),
    LInf(f64),
}

impl Ball {
    fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        match *self {
            Ball::L1(radius) => project_onto_l1_ball(v, radius),
            Ball::L2(radius) => {
                let n = v.norm();
                if n > radius {
                    v * (radius / n)
                } else {
                    v.clone()
                }
            }
            Ball::LInf(radius) => DVector::from_fn(v.len(), |i, _| v[i].clamp(-radius, radius)),
        }
    }

    /// max_{β ∈ ball} ⟨g, β⟩, i.e. the radius times the dual norm.
    fn support_value(&self, g: &DVector<f64>) -> f64 {
        match *self {
            Ball::L1(radius) => radius * g.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            Ball::L2(radius) => radius * g.norm(),
            Ball::LInf(radius) => radius * g.iter().map(|v| v.abs()).sum::<f64>(),
        }
    }
}

/// Euclidean projection onto {‖α‖₁ ≤ radius} (sort-based).
pub fn project_onto_l1_ball(v: &DVector<f64>, radius: f64) -> DVector<f64> {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return v.clone();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in mags.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - radius) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    DVector::from_fn(v.len(), |i, _| {
        let a = v[i].abs() - theta;
        if a > 0.0 {
            v[i].signum() * a
        } else {
            0.0
        }
    })
}

/// Rescale until the indicator evaluates to zero; projections can overshoot
/// the ball boundary by a rounding ulp.
fn nudge_into_ball(mut alpha: DVector<f64>, spec: &PenaltySpec) -> DVector<f64> {
    for _ in 0..64 {
        if spec.eval(&alpha).map(|v| v.is_finite()).unwrap_or(false) {
            return alpha;
        }
        alpha.scale_mut(1.0 - 4.0 * f64::EPSILON);
    }
    alpha
}

fn spectral_norm_sq(mat: &DMatrix<f64>) -> f64 {
    let svd = mat.clone().svd(false, false);
    let s = svd.singular_values.max();
    s * s
}

/// Accelerated projected gradient on ½‖x − Dα‖² over a norm ball, warm
/// started, with the linear-minimization gap
/// max_{β ∈ ball} ⟨∇f(α), α − β⟩ ≥ f(α) − f* as the certificate.
fn pg_ball_from(
    x: &DVector<f64>,
    mat: &DMatrix<f64>,
    ball: Ball,
    tol: f64,
    start: DVector<f64>,
    cap: usize,
) -> (DVector<f64>, Certificate, usize) {
    let lip = spectral_norm_sq(mat);
    if lip <= 1e-300 {
        return (ball.project(&start), Certificate::Exact, 0);
    }
    let step = 1.0 / lip;
    let mut alpha = ball.project(&start);
    let mut y = alpha.clone();
    let mut t = 1.0f64;
    let mut best_alpha = alpha.clone();
    let mut best_gap = f64::INFINITY;
    for iter in 1..=cap {
        let grad_y = mat.transpose() * (mat * &y - x);
        let next = ball.project(&(&y - &grad_y * step));
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &next + (&next - &alpha) * ((t - 1.0) / t_next);
        alpha = next;
        t = t_next;
        if iter % 4 == 0 || iter == cap {
            let grad = mat.transpose() * (mat * &alpha - x);
            let gap = grad.dot(&alpha) + ball.support_value(&(-&grad));
            if gap < best_gap {
                best_gap = gap;
                best_alpha = alpha.clone();
            }
            if best_gap <= tol {
                return (best_alpha, Certificate::DualityGap(best_gap.max(0.0)), iter);
            }
            if iter % 1024 == 0 {
                // Momentum restart; keeps the gap sequence from stalling.
                y = alpha.clone();
                t = 1.0;
            }
        }
    }
    (best_alpha, Certificate::Heuristic, cap)
}

/// Squared-ℓ1 penalty ½‖x − Dα‖² + (‖α‖₁/λ)², minimized by a golden-section
/// search over s = ‖α‖₁ (the profile is convex in s) with an ℓ1-ball inner
/// solve; the final certificate is the Fenchel gap of the full objective.
fn l1_squared(
    x: &DVector<f64>,
    dict: &Dictionary,
    lambda: f64,
    tol: f64,
) -> (DVector<f64>, Certificate, usize) {
    let mat = dict.matrix();
    let d = mat.ncols();
    // At the optimum (s/λ)² ≤ ½‖x‖², so s* ≤ λ‖x‖/√2.
    let s_hi = lambda * x.norm() / 2.0f64.sqrt() + 1e-12;
    if s_hi <= 1e-300 {
        return (DVector::zeros(d), Certificate::Exact, 0);
    }
    let inner_tol = (tol * 0.25).max(1e-14);
    let mut total_iters = 0usize;
    let mut warm = DVector::zeros(d);
    let phi = |s: f64, warm: &DVector<f64>, iters: &mut usize| -> (f64, DVector<f64>) {
        let ball = Ball::L1(s.max(0.0));
        let (alpha, _, used) = pg_ball_from(x, mat, ball, inner_tol, warm.clone(), 4000);
        *iters += used;
        let value = 0.5 * (x - mat * &alpha).norm_squared()
            + (alpha.iter().map(|v| v.abs()).sum::<f64>() / lambda).powi(2);
        (value, alpha)
    };
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, s_hi);
    let mut m1 = hi - inv_phi * (hi - lo);
    let mut m2 = lo + inv_phi * (hi - lo);
    let (mut f1, a1) = phi(m1, &warm, &mut total_iters);
    warm = a1;
    let (mut f2, a2) = phi(m2, &warm, &mut total_iters);
    warm = a2;
    for _ in 0..90 {
        if hi - lo <= 1e-11 * s_hi {
            break;
        }
        if f1 <= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - inv_phi * (hi - lo);
            let (f, a) = phi(m1, &warm, &mut total_iters);
            f1 = f;
            warm = a;
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + inv_phi * (hi - lo);
            let (f, a) = phi(m2, &warm, &mut total_iters);
            f2 = f;
            warm = a;
        }
    }
    let s_best = 0.5 * (lo + hi);
    let (_, alpha) = phi(s_best, &warm, &mut total_iters);
    let gap = l1sq_fenchel_gap(x, mat, &alpha, lambda).max(0.0);
    let cert = if gap <= tol || total_iters < MAX_ITERS {
        Certificate::DualityGap(gap)
    } else {
        Certificate::Heuristic
    };
    (alpha, cert, total_iters)
}

/// Fenchel gap for g(α) = (‖α‖₁/λ)², whose conjugate is λ²‖z‖∞²/4.
fn l1sq_fenchel_gap(
    x: &DVector<f64>,
    mat: &DMatrix<f64>,
    alpha: &DVector<f64>,
    lambda: f64,
) -> f64 {
    let residual = x - mat * alpha;
    let primal = 0.5 * residual.norm_squared()
        + (alpha.iter().map(|v| v.abs()).sum::<f64>() / lambda).powi(2);
    let z_inf = (mat.transpose() * &residual)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let dual =
        residual.dot(x) - 0.5 * residual.norm_squared() - lambda * lambda * z_inf * z_inf / 4.0;
    primal - dual
}

/// Non-negative least squares by projected gradient with the fixed step
/// 1/‖D‖₂². The optimality bound comes from the KKT residual together with
/// the restricted-eigenvalue bound ‖α*‖₁ ≤ 2‖x‖/√κ, which needs an
/// entrywise non-negative dictionary; otherwise the certificate degrades to
/// `Heuristic`.
fn nnls_pg(x: &DVector<f64>, dict: &Dictionary, tol: f64) -> (DVector<f64>, Certificate, usize) {
    let mat = dict.matrix();
    let d = mat.ncols();
    let lip = spectral_norm_sq(mat);
    if lip <= 1e-300 {
        return (DVector::zeros(d), Certificate::Exact, 0);
    }
    let step = 1.0 / lip;
    let coeff_bound = nnls_coefficient_bound(x, mat);
    let mut alpha = DVector::zeros(d);
    for iter in 1..=MAX_ITERS {
        let grad = mat.transpose() * (mat * &alpha - x);
        let mut next = &alpha - &grad * step;
        next.iter_mut().for_each(|v| {
            if *v < 0.0 {
                *v = 0.0;
            }
        });
        let moved = (&next - &alpha).norm();
        alpha = next;
        if iter % 8 == 0 || iter == MAX_ITERS || moved == 0.0 {
            let grad = mat.transpose() * (mat * &alpha - x);
            if let Some(bound) = coeff_bound {
                let neg: f64 = grad.iter().map(|v| v.min(0.0).powi(2)).sum::<f64>().sqrt();
                let gap = (grad.dot(&alpha) + neg * bound).max(0.0);
                if gap <= tol {
                    return (alpha, Certificate::DualityGap(gap), iter);
                }
            } else if moved <= 1e-15 * (1.0 + alpha.norm()) {
                return (alpha, Certificate::Heuristic, iter);
            }
        }
    }
    (alpha, Certificate::Heuristic, MAX_ITERS)
}

/// ‖α*‖₁ ≤ 2‖x‖/√κ with κ = min_j ‖d_j‖²/d, valid for entrywise
/// non-negative dictionaries with nonzero columns.
fn nnls_coefficient_bound(x: &DVector<f64>, mat: &DMatrix<f64>) -> Option<f64> {
    if mat.iter().any(|v| *v < 0.0) {
        return None;
    }
    let min_norm_sq = (0..mat.ncols())
        .map(|j| mat.column(j).norm_squared())
        .fold(f64::INFINITY, f64::min);
    if min_norm_sq <= 1e-300 {
        return None;
    }
    let kappa = min_norm_sq / mat.ncols() as f64;
    Some(2.0 * x.norm() / kappa.sqrt())
}

/// Grid/exhaustive minimization of the coding objective, used as the
/// independent ground truth in tests. Exhaustive (exact) for the k-sparse
/// and K-means penalties; a box grid of resolution `grid` otherwise, with
/// the box radius derived from envelope or restricted-eigenvalue bounds on
/// the minimizer.
pub fn brute_force_code(
    x: &DVector<f64>,
    dict: &Dictionary,
    spec: &PenaltySpec,
    grid: &GridSpec,
) -> Result<CodingResult> {
    check_dims(x, dict, spec)?;
    let mat = dict.matrix();
    let d = mat.ncols();
    match spec.kind() {
        PenaltyKind::KSparseIndicator { k } => {
            if crate::dict::binomial(d, (*k).min(d)) > KSPARSE_BUDGET {
                return Err(Error::Refusal(format!(
                    "binom({d},{k}) exceeds the exhaustive budget {KSPARSE_BUDGET}"
                )));
            }
            let (alpha, tried) = if *k >= d {
                least_squares(x, dict)
            } else {
                ksparse_exhaustive(x, dict, *k)
            };
            finish(x, dict, spec, alpha, Certificate::Exact, tried)
        }
        PenaltyKind::KMeansIndicator => {
            // Enumerate the feasible points e_j through the generic objective.
            let mut best = f64::INFINITY;
            let mut best_alpha = DVector::zeros(d);
            for j in 0..d {
                let mut alpha = DVector::zeros(d);
                alpha[j] = 1.0;
                let value = 0.5 * (x - mat * &alpha).norm_squared() + spec.eval(&alpha)?;
                if value < best {
                    best = value;
                    best_alpha = alpha;
                }
            }
            finish(x, dict, spec, best_alpha, Certificate::Exact, d)
        }
        _ => {
            if d > 3 {
                return Err(Error::Refusal(format!(
                    "grid oracle is exponential in d; d = {d} > 3"
                )));
            }
            let radius = brute_force_box_radius(x, dict, spec)?;
            let nonneg = matches!(spec.kind(), PenaltyKind::NonNegIndicator);
            let n = grid.points_per_dim.max(2);
            let axis: Vec<f64> = if nonneg {
                (0..n).map(|i| radius * i as f64 / (n - 1) as f64).collect()
            } else {
                (0..n)
                    .map(|i| -radius + 2.0 * radius * i as f64 / (n - 1) as f64)
                    .collect()
            };
            let cols: Vec<DVector<f64>> = (0..d).map(|j| mat.column(j).into_owned()).collect();
            let mut best = f64::INFINITY;
            let mut best_alpha = DVector::zeros(d);
            let mut point = vec![0.0f64; d];
            let start_residual = x.clone();
            grid_scan(
                spec,
                &cols,
                &axis,
                0,
                &mut point,
                &start_residual,
                &mut best,
                &mut best_alpha,
            );
            finish(
                x,
                dict,
                spec,
                best_alpha,
                Certificate::Heuristic,
                n.pow(d as u32),
            )
        }
    }
}

fn brute_force_box_radius(x: &DVector<f64>, dict: &Dictionary, spec: &PenaltySpec) -> Result<f64> {
    let mat = dict.matrix();
    match spec.kind() {
        PenaltyKind::LpNormPower { .. } | PenaltyKind::LpBallIndicator { .. } => {
            // ‖α*‖₁ ≤ ḡ(f_x) ≤ ḡ(½‖x‖²) under the norm-like assumptions.
            spec.gbar(0.5 * x.norm_squared(), Regime::A)
        }
        PenaltyKind::NonNegIndicator => nnls_coefficient_bound(x, mat).ok_or_else(|| {
            Error::Refusal(
                "grid oracle for the non-negative penalty needs an entrywise non-negative \
                 dictionary"
                    .into(),
            )
        }),
        PenaltyKind::Zero => {
            let svd = mat.clone().svd(false, false);
            let smax = svd.singular_values.max();
            let smin_pos = svd
                .singular_values
                .iter()
                .copied()
                .filter(|s| *s > smax * 1e-10)
                .fold(f64::INFINITY, f64::min);
            if smin_pos.is_finite() {
                Ok(x.norm() / smin_pos * (1.0 + 1e-9))
            } else {
                Ok(0.0)
            }
        }
        kind => Err(Error::Refusal(format!("no grid oracle for {kind:?}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn grid_scan(
    spec: &PenaltySpec,
    cols: &[DVector<f64>],
    axis: &[f64],
    depth: usize,
    point: &mut Vec<f64>,
    partial_residual: &DVector<f64>,
    best: &mut f64,
    best_alpha: &mut DVector<f64>,
) {
    let d = cols.len();
    if depth + 1 == d {
        // Last coordinate: sweep it with the closed-form residual norm
        // ‖r − c·v‖² = ‖r‖² − 2v⟨r,c⟩ + v²‖c‖², no per-leaf allocation.
        let col = &cols[depth];
        let r_sq = partial_residual.norm_squared();
        let dot = partial_residual.dot(col);
        let c_sq = col.norm_squared();
        let mut scratch = DVector::zeros(d);
        for (i, &pv) in point.iter().enumerate().take(depth) {
            scratch[i] = pv;
        }
        for &v in axis {
            scratch[depth] = v;
            let Ok(penalty) = spec.eval(&scratch) else { continue };
            if !penalty.is_finite() {
                continue;
            }
            let value = 0.5 * (r_sq - 2.0 * v * dot + v * v * c_sq) + penalty;
            if value < *best {
                *best = value;
                *best_alpha = scratch.clone();
            }
        }
        return;
    }
    for &v in axis {
        point[depth] = v;
        let residual = partial_residual - &cols[depth] * v;
        grid_scan(spec, cols, axis, depth + 1, point, &residual, best, best_alpha);
    }
}

/// Mean coding cost over the columns of `x_all`. Columns are evaluated in
/// parallel chunks and reduced in fixed index order, so the result does not
/// depend on the number of threads.
pub fn empirical_cost(
    x_all: &DMatrix<f64>,
    dict: &Dictionary,
    spec: &PenaltySpec,
    tol: f64,
) -> Result<f64> {
    Ok(empirical_cost_detailed(x_all, dict, spec, tol)?.value)
}

/// Like [`empirical_cost`], also aggregating certificate diagnostics.
pub fn empirical_cost_detailed(
    x_all: &DMatrix<f64>,
    dict: &Dictionary,
    spec: &PenaltySpec,
    tol: f64,
) -> Result<CostSummary> {
    let n = x_all.ncols();
    if n == 0 {
        return Err(Error::Config("empirical cost needs at least one sample".into()));
    }
    if x_all.nrows() != dict.shape().0 {
        return Err(Error::DimMismatch(format!(
            "samples have dimension {}, dictionary expects {}",
            x_all.nrows(),
            dict.shape().0
        )));
    }
    const CHUNK: usize = 256; // fixed for reproducible summation grouping
    let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
    let kmeans = matches!(spec.kind(), PenaltyKind::KMeansIndicator);
    let m = x_all.nrows();
    let chunks: Result<Vec<(f64, f64, f64, usize)>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK).min(n);
            let mut sum = 0.0;
            let mut max_gap = 0.0f64;
            let mut gap_sum = 0.0;
            let mut heuristics = 0usize;
            for j in start..end {
                if kmeans {
                    let x = &x_all.as_slice()[j * m..(j + 1) * m];
                    sum += kmeans_value_slice(x, dict.matrix()).0;
                } else {
                    let x = x_all.column(j).into_owned();
                    let result = code(&x, dict, spec, tol)?;
                    sum += result.value;
                    if matches!(result.certificate, Certificate::Heuristic) {
                        heuristics += 1;
                    } else {
                        let gap = result.certificate.gap_bound();
                        max_gap = max_gap.max(gap);
                        gap_sum += gap;
                    }
                }
            }
            Ok((sum, max_gap, gap_sum, heuristics))
        })
        .collect();
    let chunks = chunks?;
    let mut total = 0.0;
    let mut max_gap = 0.0f64;
    let mut gap_sum = 0.0;
    let mut heuristics = 0;
    for (s, mg, gs, h) in chunks {
        total += s;
        max_gap = max_gap.max(mg);
        gap_sum += gs;
        heuristics += h;
    }
    Ok(CostSummary {
        value: total / n as f64,
        max_gap,
        gap_sum,
        heuristic_columns: heuristics,
    })
}

/// Computable Lipschitz data of D ↦ F_X(D): the slope L and the quadratic
/// weight C_q.
///
/// Regime A: L = (1/n) Σ ‖x_i‖·ḡ(‖x_i‖²/2), C_q = (1/2n) Σ ḡ(‖x_i‖²/2)².
/// For the K-means penalty (ḡ ≡ 1) the slope is valid over classes with
/// equal-norm atoms, where the quadratic atom terms cancel.
///
/// Regime B: L = (2/(n√κ))·‖X‖_F², C_q = (2/(nκ))·‖X‖_F².
pub fn lipschitz_constant(
    x_all: &DMatrix<f64>,
    spec: &PenaltySpec,
    regime: Regime,
) -> Result<(f64, f64)> {
    let n = x_all.ncols();
    if n == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    match regime {
        Regime::A => {
            let mut l = 0.0;
            let mut cq = 0.0;
            for j in 0..n {
                let nrm = x_all.column(j).norm();
                let gb = spec.gbar(0.5 * nrm * nrm, Regime::A)?;
                l += nrm * gb;
                cq += gb * gb;
            }
            Ok((l / n as f64, cq / (2.0 * n as f64)))
        }
        Regime::B { kappa } => {
            // Reject regime-A penalties early; the formula below is B-only.
            spec.gbar(1.0, regime)?;
            let fro_sq = x_all.iter().map(|v| v * v).sum::<f64>();
            let l = 2.0 * fro_sq / (n as f64 * kappa.sqrt());
            let cq = 2.0 * fro_sq / (n as f64 * kappa);
            Ok((l, cq))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dict::{op_norm_1to2, ClassKind, DictionaryClassSpec};
    use crate::rng;
    use approx::assert_relative_eq;

    fn penalty(kind: PenaltyKind, d: usize) -> PenaltySpec {
        PenaltySpec::new(kind, d).unwrap()
    }

    fn lasso(lambda: f64, d: usize) -> PenaltySpec {
        penalty(
            PenaltyKind::LpNormPower {
                p: ExtReal::Finite(1.0),
                r: 1.0,
                lambda,
            },
            d,
        )
    }

    fn random_unit_norm(m: usize, d: usize, seed: u64) -> Dictionary {
        let class = DictionaryClassSpec::new(ClassKind::UnitNorm { m, d }).unwrap();
        class.sample(&mut rng::stream(seed, 0)).unwrap()
    }

    #[test]
    fn kmeans_atom_hit_is_zero() {
        let dict = Dictionary::new(DMatrix::identity(2, 2)).unwrap();
        let spec = penalty(PenaltyKind::KMeansIndicator, 2);
        let x = DVector::from_vec(vec![1.0, 0.0]);
        let res = code(&x, &dict, &spec, DEFAULT_TOL).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.alpha, DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(res.certificate, Certificate::Exact);
    }

    #[test]
    fn kmeans_ties_break_to_lowest_index() {
        let dict = Dictionary::new(DMatrix::identity(2, 2)).unwrap();
        let spec = penalty(PenaltyKind::KMeansIndicator, 2);
        let x = DVector::from_vec(vec![0.5, 0.5]);
        let res = code(&x, &dict, &spec, DEFAULT_TOL).unwrap();
        assert_eq!(res.alpha[0], 1.0);
    }

    #[test]
    fn zero_penalty_orthogonal_complement() {
        // Stiefel frame spanning the first two coordinates of ℝ³.
        let mut mat = DMatrix::zeros(3, 2);
        mat[(0, 0)] = 1.0;
        mat[(1, 1)] = 1.0;
        let dict = Dictionary::new(mat).unwrap();
        let spec = penalty(PenaltyKind::Zero, 2);
        let x = DVector::from_vec(vec![0.0, 0.0, 2.0]);
        let res = code(&x, &dict, &spec, DEFAULT_TOL).unwrap();
        assert_relative_eq!(res.value, 2.0, max_relative = 1e-14);
        assert_eq!(res.certificate, Certificate::Exact);
    }

    #[test]
    fn lasso_orthonormal_soft_threshold() {
        // g = ‖α‖₁/λ with λ = 2 puts the soft-threshold level at 1/λ = 0.5.
        let dict = Dictionary::new(DMatrix::identity(2, 2)).unwrap();
        let spec = lasso(2.0, 2);
        let x = DVector::from_vec(vec![1.0, -0.9]);
        let res = code(&x, &dict, &spec, 1e-10).unwrap();
        let expected = DVector::from_vec(vec![0.5, -0.4]);
        assert_relative_eq!((res.alpha.clone() - &expected).norm(), 0.0, epsilon = 1e-9);
        let brute = brute_force_code(&x, &dict, &spec, &GridSpec::new(1501)).unwrap();
        assert!(res.value <= brute.value + 1e-8);
        assert!((res.value - brute.value).abs() <= 2e-5);
    }

    #[test]
    fn ksparse_exhaustive_matches_rank_one_fits() {
        let dict = random_unit_norm(4, 3, 5);
        let spec = penalty(PenaltyKind::KSparseIndicator { k: 1 }, 3);
        let mut r = rng::stream(6, 0);
        let x = crate::dict::unit_sphere_vector(4, &mut r);
        let res = code(&x, &dict, &spec, DEFAULT_TOL).unwrap();
        let mut best = f64::INFINITY;
        for j in 0..3 {
            let col = dict.matrix().column(j);
            let coeff = col.dot(&x) / col.norm_squared();
            let value = 0.5 * (&x - col * coeff).norm_squared();
            best = best.min(value);
        }
        assert_relative_eq!(res.value, best, max_relative = 1e-12);
        assert_eq!(res.certificate, Certificate::Exact);
    }

    #[test]
    fn nonneg_in_cone_is_zero() {
        let dict = Dictionary::new(DMatrix::identity(2, 2)).unwrap();
        let spec = penalty(PenaltyKind::NonNegIndicator, 2);
        let x = DVector::from_vec(vec![0.7, 0.2]);
        let res = code(&x, &dict, &spec, 1e-10).unwrap();
        assert!(res.value <= 1e-10, "value {}", res.value);
        assert!(res.certificate.gap_bound() <= 1e-10);
    }

    #[test]
    fn l1_ball_projection_cases() {
        let inside = DVector::from_vec(vec![0.2, -0.1]);
        assert_eq!(project_onto_l1_ball(&inside, 1.0), inside);
        let outside = DVector::from_vec(vec![2.0, 0.0]);
        let p = project_onto_l1_ball(&outside, 1.0);
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-12);
        let v = DVector::from_vec(vec![1.0, 1.0]);
        let p = project_onto_l1_ball(&v, 1.0);
        assert_relative_eq!(p.iter().map(|x| x.abs()).sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(p[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ball_solvers_reach_certified_gaps() {
        let dict = random_unit_norm(4, 3, 9);
        let mut r = rng::stream(10, 0);
        let x = crate::dict::unit_sphere_vector(4, &mut r) * 1.5;
        for p in [ExtReal::Finite(1.0), ExtReal::Finite(2.0), ExtReal::Inf] {
            let spec = penalty(PenaltyKind::LpBallIndicator { p, lambda: 0.8 }, 3);
            let res = code(&x, &dict, &spec, 1e-9).unwrap();
            assert!(res.certificate.gap_bound() <= 1e-9, "p={p:?}");
            // Feasibility is exact after the nudge.
            assert_eq!(spec.eval(&res.alpha).unwrap(), 0.0);
        }
    }

    #[test]
    fn unsupported_combinations_are_refused() {
        let dict = random_unit_norm(3, 2, 1);
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let spec = penalty(
            PenaltyKind::LpNormPower {
                p: ExtReal::Finite(2.0),
                r: 1.0,
                lambda: 1.0,
            },
            2,
        );
        assert!(matches!(code(&x, &dict, &spec, 1e-8), Err(Error::Refusal(_))));
        let spec = penalty(
            PenaltyKind::LpBallIndicator {
                p: ExtReal::Finite(3.0),
                lambda: 1.0,
            },
            2,
        );
        assert!(matches!(code(&x, &dict, &spec, 1e-8), Err(Error::Refusal(_))));
    }

    #[test]
    fn values_recompute_exactly() {
        let dict = random_unit_norm(4, 3, 2);
        let mut r = rng::stream(3, 1);
        let x = crate::dict::unit_sphere_vector(4, &mut r);
        for spec in [
            lasso(1.5, 3),
            penalty(PenaltyKind::KSparseIndicator { k: 2 }, 3),
            penalty(PenaltyKind::KMeansIndicator, 3),
            penalty(
                PenaltyKind::LpBallIndicator {
                    p: ExtReal::Finite(1.0),
                    lambda: 0.7,
                },
                3,
            ),
        ] {
            let res = code(&x, &dict, &spec, 1e-9).unwrap();
            let recomputed = 0.5 * (&x - dict.matrix() * &res.alpha).norm_squared()
                + spec.eval(&res.alpha).unwrap();
            assert_eq!(res.value, recomputed);
        }
    }

    #[test]
    fn oracle_domination_on_small_instances() {
        let mut r = rng::stream(14, 0);
        for trial in 0..6 {
            let dict = random_unit_norm(3, 2, 100 + trial);
            let x = crate::dict::unit_sphere_vector(3, &mut r) * 1.2;
            let specs = [
                lasso(1.0, 2),
                penalty(
                    PenaltyKind::LpNormPower {
                        p: ExtReal::Finite(1.0),
                        r: 2.0,
                        lambda: 1.0,
                    },
                    2,
                ),
                penalty(
                    PenaltyKind::LpBallIndicator {
                        p: ExtReal::Finite(2.0),
                        lambda: 0.9,
                    },
                    2,
                ),
                penalty(PenaltyKind::NonNegIndicator, 2),
                penalty(PenaltyKind::Zero, 2),
            ];
            for spec in specs {
                let res = match code(&x, &dict, &spec, 1e-9) {
                    Ok(r) => r,
                    Err(Error::Refusal(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                let brute = match brute_force_code(&x, &dict, &spec, &GridSpec::new(301)) {
                    Ok(b) => b,
                    // The non-negative grid needs a non-negative dictionary.
                    Err(Error::Refusal(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                assert!(
                    res.value <= brute.value + res.certificate.gap_bound() + 1e-12,
                    "{:?}: solver {} vs grid {}",
                    spec.kind(),
                    res.value,
                    brute.value
                );
            }
        }
    }

    #[test]
    fn nonneg_solver_dominated_by_grid() {
        let class = DictionaryClassSpec::new(ClassKind::NmfSimplex { m: 4, d: 2 }).unwrap();
        let spec = penalty(PenaltyKind::NonNegIndicator, 2);
        for trial in 0..4 {
            let mut r = rng::stream(40, trial);
            let dict = class.sample(&mut r).unwrap();
            let x = crate::dict::unit_sphere_vector(4, &mut r);
            let res = code(&x, &dict, &spec, 1e-9).unwrap();
            let brute = brute_force_code(&x, &dict, &spec, &GridSpec::new(401)).unwrap();
            assert!(
                res.value <= brute.value + res.certificate.gap_bound() + 1e-12,
                "solver {} vs grid {}",
                res.value,
                brute.value
            );
        }
    }

    #[test]
    fn l1_squared_matches_grid() {
        let dict = random_unit_norm(3, 2, 21);
        let mut r = rng::stream(22, 0);
        let x = crate::dict::unit_sphere_vector(3, &mut r) * 1.4;
        let spec = penalty(
            PenaltyKind::LpNormPower {
                p: ExtReal::Finite(1.0),
                r: 2.0,
                lambda: 1.2,
            },
            2,
        );
        let res = code(&x, &dict, &spec, 1e-9).unwrap();
        assert!(res.certificate.gap_bound() <= 1e-9);
        let brute = brute_force_code(&x, &dict, &spec, &GridSpec::new(1201)).unwrap();
        assert!((res.value - brute.value).abs() <= 5e-5);
        assert!(res.value <= brute.value + 1e-12);
    }

    #[test]
    fn empirical_cost_basics() {
        let dict = Dictionary::new(DMatrix::identity(2, 2)).unwrap();
        let spec = penalty(PenaltyKind::KMeansIndicator, 2);
        // Single column equals the coding value.
        let x = DMatrix::from_column_slice(2, 1, &[0.3, 0.4]);
        let single = empirical_cost(&x, &dict, &spec, DEFAULT_TOL).unwrap();
        let direct = code(&x.column(0).into_owned(), &dict, &spec, DEFAULT_TOL).unwrap();
        assert_eq!(single, direct.value);
        // Duplicated columns average to the same value.
        let xx = DMatrix::from_column_slice(2, 2, &[0.3, 0.4, 0.3, 0.4]);
        assert_relative_eq!(
            empirical_cost(&xx, &dict, &spec, DEFAULT_TOL).unwrap(),
            single,
            max_relative = 1e-15
        );
        // Atoms themselves cost zero.
        let toy = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(empirical_cost(&toy, &dict, &spec, DEFAULT_TOL).unwrap(), 0.0);
    }

    #[test]
    fn lipschitz_constant_formulas() {
        // lasso: L = (λ/2n) Σ ‖x_i‖³.
        let spec = lasso(1.5, 4);
        let x = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let (l, _) = lipschitz_constant(&x, &spec, Regime::A).unwrap();
        let expected = 1.5 / (2.0 * 2.0) * (1.0f64.powi(3) + 2.0f64.powi(3));
        assert_relative_eq!(l, expected, max_relative = 1e-14);

        // unit-sphere samples with the ℓ1 ball: L = λ.
        let ball = penalty(
            PenaltyKind::LpBallIndicator {
                p: ExtReal::Finite(1.0),
                lambda: 0.6,
            },
            4,
        );
        let sphere = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let (l, _) = lipschitz_constant(&sphere, &ball, Regime::A).unwrap();
        assert_relative_eq!(l, 0.6, max_relative = 1e-14);

        // regime B with κ = 1 and a single unit-norm sample: L = 2, C_q = 2.
        let ks = penalty(PenaltyKind::KSparseIndicator { k: 1 }, 4);
        let one = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let (l, cq) = lipschitz_constant(&one, &ks, Regime::b(1.0).unwrap()).unwrap();
        assert_relative_eq!(l, 2.0, max_relative = 1e-14);
        assert_relative_eq!(cq, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn global_lipschitz_inequality_exact_solvers() {
        // K-means over unit-norm dictionaries: |ΔF| ≤ L·‖ΔD‖ with exact codes.
        let spec = penalty(PenaltyKind::KMeansIndicator, 4);
        let class = DictionaryClassSpec::new(ClassKind::UnitNorm { m: 3, d: 4 }).unwrap();
        let mut r = rng::stream(31, 0);
        let x = {
            let mut m = DMatrix::zeros(3, 20);
            for j in 0..20 {
                m.set_column(j, &crate::dict::unit_sphere_vector(3, &mut r));
            }
            m
        };
        let (l, _) = lipschitz_constant(&x, &spec, Regime::A).unwrap();
        for _ in 0..50 {
            let d1 = class.sample(&mut r).unwrap();
            let d2 = class.sample(&mut r).unwrap();
            let f1 = empirical_cost(&x, &d1, &spec, DEFAULT_TOL).unwrap();
            let f2 = empirical_cost(&x, &d2, &spec, DEFAULT_TOL).unwrap();
            let dist = op_norm_1to2(&(d1.matrix() - d2.matrix()));
            assert!((f1 - f2).abs() <= l * dist * (1.0 + 1e-9));
        }
    }

    #[test]
    fn local_lipschitz_inequality_regime_b() {
        // Zero penalty on Stiefel frames, κ = 1/d.
        let spec = penalty(PenaltyKind::Zero, 3);
        let class = DictionaryClassSpec::new(ClassKind::Stiefel { m: 6, d: 3 }).unwrap();
        let kappa = 1.0 / 3.0;
        let mut r = rng::stream(32, 0);
        let x = {
            let mut m = DMatrix::zeros(6, 15);
            for j in 0..15 {
                m.set_column(j, &crate::dict::unit_sphere_vector(6, &mut r));
            }
            m
        };
        let (l, _) = lipschitz_constant(&x, &spec, Regime::b(kappa).unwrap()).unwrap();
        for _ in 0..40 {
            let d1 = class.sample(&mut r).unwrap();
            let d2 = class.sample(&mut r).unwrap();
            let f1 = empirical_cost(&x, &d1, &spec, DEFAULT_TOL).unwrap();
            let f2 = empirical_cost(&x, &d2, &spec, DEFAULT_TOL).unwrap();
            let dist = op_norm_1to2(&(d1.matrix() - d2.matrix()));
            let bound = l * (1.0 + (1.0 / kappa).sqrt() * dist) * dist;
            assert!((f1 - f2).abs() <= bound * (1.0 + 1e-9));
        }
    }
}
