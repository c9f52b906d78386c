//! Training-data generators and their concentration parameters.
//!
//! Each distribution carries the constants (c, T) entering the deviation
//! inequality Δ_n(cτ) ≤ 2·exp(−nτ²) for 0 ≤ τ ≤ T, and an admissible
//! Lipschitz level L with Γ_n(L) = 0 (bounded support) or Γ_n(L) → 0
//! (sub-Gaussian, estimated by quantile-inflated Monte Carlo).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dict::{unit_sphere_vector, Dictionary};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::penalty::{PenaltyKind, PenaltySpec, Regime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum DistributionSpec {
    /// Uniform law on the sphere of radius R in ℝ^m.
    UniformSphere { radius: f64, m: usize },
    /// Uniform law on the ball of radius R in ℝ^m.
    UniformBall { radius: f64, m: usize },
    /// x = D₀·α₀ + ε with a uniformly drawn k-support, Gaussian(0, σ_α²)
    /// coefficients on the support and Gaussian(0, σ_ε²) noise — a
    /// sub-Gaussian instance of the sparse signal model.
    SubGaussianSparse {
        dictionary: Dictionary,
        k: usize,
        sigma_alpha: f64,
        sigma_eps: f64,
    },
}

/// Concentration data: Δ_n(cτ) ≤ 2·exp(−nτ²) for 0 ≤ τ ≤ T, plus the tail
/// scale A with P(‖x‖² ≥ A·t) ≤ e^{−t} when available.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcentrationParams {
    pub c: f64,
    pub t_horizon: ExtReal,
    pub a: Option<f64>,
}

/// How an admissible Lipschitz level was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method")]
pub enum LipschitzMethod {
    /// Bounded support: L = R·ḡ(R²/2) (K-means: R + 1), with Γ_n(L) = 0.
    BoundedExact,
    /// Quantile-inflated Monte Carlo estimate of the moment E‖x‖ḡ(‖x‖²/2).
    MonteCarloQuantile {
        samples: usize,
        bootstrap: usize,
        quantile: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzEstimate {
    pub value: f64,
    pub method: LipschitzMethod,
}

impl DistributionSpec {
    pub fn validated(self) -> Result<Self> {
        match &self {
            DistributionSpec::UniformSphere { radius, m }
            | DistributionSpec::UniformBall { radius, m } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Config(format!("radius must be positive, got {radius}")));
                }
                if *m == 0 {
                    return Err(Error::Config("dimension must be ≥ 1".into()));
                }
            }
            DistributionSpec::SubGaussianSparse {
                dictionary,
                k,
                sigma_alpha,
                sigma_eps,
            } => {
                let (_, d) = dictionary.shape();
                if *k == 0 || *k > d {
                    return Err(Error::Config(format!(
                        "support size k = {k} must satisfy 1 ≤ k ≤ d = {d}"
                    )));
                }
                if !(*sigma_alpha > 0.0) || !(*sigma_eps >= 0.0) {
                    return Err(Error::Config(
                        "need σ_α > 0 and σ_ε ≥ 0 in the sparse model".into(),
                    ));
                }
            }
        }
        Ok(self)
    }

    /// Signal dimension m.
    pub fn signal_dim(&self) -> usize {
        match self {
            DistributionSpec::UniformSphere { m, .. } | DistributionSpec::UniformBall { m, .. } => {
                *m
            }
            DistributionSpec::SubGaussianSparse { dictionary, .. } => dictionary.shape().0,
        }
    }

    /// Essential-support radius, when the law is bounded.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            DistributionSpec::UniformSphere { radius, .. }
            | DistributionSpec::UniformBall { radius, .. } => Some(*radius),
            DistributionSpec::SubGaussianSparse { .. } => None,
        }
    }

    /// Draw n training vectors as the columns of an m×n matrix.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> DMatrix<f64> {
        let m = self.signal_dim();
        let mut out = DMatrix::zeros(m, n);
        for j in 0..n {
            out.set_column(j, &self.sample_one(rng));
        }
        out
    }

    pub fn sample_one<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        match self {
            DistributionSpec::UniformSphere { radius, m } => {
                unit_sphere_vector(*m, rng) * *radius
            }
            DistributionSpec::UniformBall { radius, m } => {
                let u: f64 = rng.random();
                unit_sphere_vector(*m, rng) * (*radius * u.powf(1.0 / *m as f64))
            }
            DistributionSpec::SubGaussianSparse {
                dictionary,
                k,
                sigma_alpha,
                sigma_eps,
            } => {
                let (m, d) = dictionary.shape();
                let mut support: Vec<usize> = rand::seq::index::sample(rng, d, *k).into_vec();
                support.sort_unstable();
                let mut alpha = DVector::zeros(d);
                for &j in &support {
                    let g: f64 = rng.sample(StandardNormal);
                    alpha[j] = sigma_alpha * g;
                }
                let mut x = dictionary.matrix() * alpha;
                if *sigma_eps > 0.0 {
                    for i in 0..m {
                        let g: f64 = rng.sample(StandardNormal);
                        x[i] += sigma_eps * g;
                    }
                }
                x
            }
        }
    }

    /// The constants (c, T) of the concentration assumption, and the tail
    /// scale A for the sub-Gaussian model.
    ///
    /// For the sparse model A uses the proven constant 5(kσ_α² + mσ_ε²);
    /// the factor 5 is what the tail bound actually certifies.
    pub fn concentration_params(&self) -> ConcentrationParams {
        match self {
            DistributionSpec::UniformSphere { radius, .. }
            | DistributionSpec::UniformBall { radius, .. } => ConcentrationParams {
                c: radius * radius / 8.0f64.sqrt(),
                t_horizon: ExtReal::Inf,
                a: None,
            },
            DistributionSpec::SubGaussianSparse {
                dictionary,
                k,
                sigma_alpha,
                sigma_eps,
                ..
            } => {
                let m = dictionary.shape().0 as f64;
                let a = 5.0 * (*k as f64 * sigma_alpha * sigma_alpha + m * sigma_eps * sigma_eps);
                ConcentrationParams {
                    c: 12.0 * a,
                    t_horizon: ExtReal::Finite(1.0),
                    a: Some(a),
                }
            }
        }
    }

    /// An admissible Lipschitz level L with controlled Γ_n(L).
    ///
    /// Bounded support gives the exact worst-case level R·ḡ(R²/2) (K-means:
    /// R + 1, atoms being confined to the unit ball), with Γ_n(L) = 0. For
    /// the unbounded sparse model, the moment E‖x‖·ḡ(‖x‖²/2) is estimated
    /// by Monte Carlo and inflated to the `quantile_target` quantile of the
    /// bootstrap law of the sample mean.
    pub fn lipschitz_l<R: Rng>(
        &self,
        spec: &PenaltySpec,
        regime: Regime,
        quantile_target: f64,
        rng: &mut R,
    ) -> Result<LipschitzEstimate> {
        if !(0.5 <= quantile_target && quantile_target < 1.0) {
            return Err(Error::Config(format!(
                "quantile target must lie in [0.5, 1), got {quantile_target}"
            )));
        }
        if let Some(radius) = self.support_radius() {
            let value = if matches!(spec.kind(), PenaltyKind::KMeansIndicator) {
                radius + 1.0
            } else {
                radius * spec.gbar(radius * radius / 2.0, regime)?
            };
            return Ok(LipschitzEstimate {
                value,
                method: LipschitzMethod::BoundedExact,
            });
        }
        const SAMPLES: usize = 20_000;
        const BOOTSTRAP: usize = 400;
        let mut moments = Vec::with_capacity(SAMPLES);
        for _ in 0..SAMPLES {
            let x = self.sample_one(rng);
            let nrm = x.norm();
            let weight = if matches!(spec.kind(), PenaltyKind::KMeansIndicator) {
                nrm + 1.0
            } else {
                nrm * spec.gbar(nrm * nrm / 2.0, regime)?
            };
            moments.push(weight);
        }
        let mut means = Vec::with_capacity(BOOTSTRAP);
        for _ in 0..BOOTSTRAP {
            let mut sum = 0.0;
            for _ in 0..SAMPLES {
                sum += moments[rng.random_range(0..SAMPLES)];
            }
            means.push(sum / SAMPLES as f64);
        }
        means.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let idx = ((quantile_target * BOOTSTRAP as f64).ceil() as usize).min(BOOTSTRAP - 1);
        Ok(LipschitzEstimate {
            value: means[idx],
            method: LipschitzMethod::MonteCarloQuantile {
                samples: SAMPLES,
                bootstrap: BOOTSTRAP,
                quantile: quantile_target,
            },
        })
    }
}
