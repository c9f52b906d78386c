//! Sample-complexity calculus: β, η_n, admissible sample sizes, the
//! worked closed-form β formulas, and scenario assembly into a
//! [`BoundReport`].
//!
//! Conventions: `h`/`c_cov` are the covering exponent and constant (C) of
//! the dictionary class, `c_conc` the concentration scale (c), `l` the
//! Lipschitz level (L). Logs are natural.

use serde::{Deserialize, Serialize};

use crate::dict::{kappa_of, ClassKind, DictionaryClassSpec};
use crate::distribution::{DistributionSpec, LipschitzMethod};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::penalty::{PenaltySpec, Regime};
use crate::{penalty::PExp, rng};

/// β = h·max(log(2LC/c), 1).
pub fn beta(h: f64, c_cov: f64, l: f64, c_conc: f64) -> Result<f64> {
    if !(h >= 1.0) || !(c_cov >= 1.0) {
        return Err(Error::Config(format!(
            "covering constants must satisfy h ≥ 1 and C ≥ 1, got h={h}, C={c_cov}"
        )));
    }
    if !(l > 0.0) || !(c_conc > 0.0) {
        return Err(Error::Config(format!(
            "need L > 0 and c > 0, got L={l}, c={c_conc}"
        )));
    }
    Ok(h * (2.0 * l * c_cov / c_conc).ln().max(1.0))
}

/// Coefficient of the √(β log n / n) term: 2c under the norm-like bundle or
/// a convex regime-B class, 3c otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaFlavor {
    TwoC,
    ThreeC,
}

impl EtaFlavor {
    pub fn coefficient(self) -> f64 {
        match self {
            EtaFlavor::TwoC => 2.0,
            EtaFlavor::ThreeC => 3.0,
        }
    }
}

/// η_n = coef·c·√(β log n / n) + c·√((β + x)/n).
pub fn eta_n(n: u64, x: f64, beta: f64, c_conc: f64, flavor: EtaFlavor) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config(format!("need n ≥ 2, got {n}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Config(format!("need x ≥ 0, got {x}")));
    }
    if !(beta >= 1.0) {
        return Err(Error::Config(format!("need β ≥ 1, got {beta}")));
    }
    let nf = n as f64;
    Ok(flavor.coefficient() * c_conc * (beta * nf.ln() / nf).sqrt()
        + c_conc * ((beta + x) / nf).sqrt())
}

/// The D constant of the sample-size condition: 1 under the norm-like or
/// convex bundles, max(1/κ, 1) otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DConst {
    One,
    InvKappa(f64),
}

impl DConst {
    fn value(self) -> f64 {
        match self {
            DConst::One => 1.0,
            DConst::InvKappa(kappa) => (1.0 / kappa).max(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SampleSizeCheck {
    pub ok: bool,
    /// The binding threshold on n/log n.
    pub threshold: f64,
    /// Largest admissible confidence parameter, x_max = nT² − β·log n.
    pub x_max: ExtReal,
}

/// n is admissible iff n/log n ≥ max(8, β/T², D·(c/2L)²·β).
pub fn sample_size_ok(
    n: u64,
    beta: f64,
    t_horizon: ExtReal,
    c_conc: f64,
    l: f64,
    dconst: DConst,
) -> SampleSizeCheck {
    let nf = n as f64;
    let t_term = match t_horizon {
        ExtReal::Inf => 0.0,
        ExtReal::Finite(t) => beta / (t * t),
    };
    let threshold = 8.0f64
        .max(t_term)
        .max(dconst.value() * (c_conc / (2.0 * l)).powi(2) * beta);
    let ok = n >= 2 && nf / nf.ln() >= threshold;
    let x_max = match t_horizon {
        ExtReal::Inf => ExtReal::Inf,
        ExtReal::Finite(t) => ExtReal::Finite(nf * t * t - beta * nf.ln()),
    };
    SampleSizeCheck {
        ok,
        threshold,
        x_max,
    }
}

// --- worked closed-form β formulas ---

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "example")]
pub enum WorkedExample {
    /// PCA on the Stiefel class, data in the unit ball.
    PcaBall { m: usize, d: usize },
    /// PCA with sub-Gaussian data of tail scale A.
    PcaSubGaussian { m: usize, d: usize, a: f64 },
    /// ℓp-ball indicator on unit-norm dictionaries, unit-ball data.
    SparseLpBall { m: usize, d: usize, p: PExp, lambda: f64 },
    /// k-sparse indicator on the lower-RIP class, unit-ball data.
    SparseKSparse { m: usize, d: usize, k: usize, delta: f64 },
    /// ℓ1 norm penalty ‖α‖₁/λ, unit-ball data.
    SparseL1 { m: usize, d: usize, lambda: f64 },
    /// Squared ℓ1 penalty (‖α‖₁/λ)², unit-ball data.
    SparseL1Squared { m: usize, d: usize, lambda: f64 },
    /// ℓ1-ball indicator on s-sparse dictionaries (Stirling upper bound).
    DoublySparseL1Ball { m: usize, d: usize, s: usize, lambda: f64 },
    /// k-sparse indicator on s-sparse lower-RIP dictionaries (upper bound).
    DoublySparseKSparse { m: usize, d: usize, s: usize, k: usize, delta: f64 },
    /// Non-negative factorization on ℓ1-normalized non-negative atoms.
    Nmf { m: usize, d: usize },
    /// K-means with K centers in the unit ball.
    KMeans { m: usize, k: usize },
    /// Higher-order SVD over a Stiefel tensor class.
    Hosvd { factors: Vec<(usize, usize)> },
    /// Squared ℓ1 penalty with sub-Gaussian data of tail scale A.
    SubGaussianL1Squared { m: usize, d: usize, lambda: f64, a: f64 },
}

/// The four ingredients (h, C, L, c) a worked example feeds into the
/// generic β, plus whether the closed form is a Stirling upper bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExampleParts {
    pub h: f64,
    pub c_cov: f64,
    pub l: f64,
    pub c_conc: f64,
    pub is_upper_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorkedBetaRow {
    pub name: String,
    pub beta_formula: f64,
    pub beta_generic: f64,
    pub parts: ExampleParts,
}

const SQRT8: f64 = 2.828_427_124_746_190_3; // √8
fn pi_e_pi() -> f64 {
    std::f64::consts::PI * std::f64::consts::E.powf(std::f64::consts::PI)
}

fn stiefel_h(m: usize, d: usize) -> f64 {
    (m * d - d * (d + 1) / 2) as f64
}

impl WorkedExample {
    pub fn name(&self) -> String {
        match self {
            WorkedExample::PcaBall { .. } => "pca_ball".into(),
            WorkedExample::PcaSubGaussian { .. } => "pca_subgaussian".into(),
            WorkedExample::SparseLpBall { .. } => "sparse_lp_ball".into(),
            WorkedExample::SparseKSparse { .. } => "sparse_k_sparse".into(),
            WorkedExample::SparseL1 { .. } => "sparse_l1".into(),
            WorkedExample::SparseL1Squared { .. } => "sparse_l1_squared".into(),
            WorkedExample::DoublySparseL1Ball { .. } => "doubly_sparse_l1_ball".into(),
            WorkedExample::DoublySparseKSparse { .. } => "doubly_sparse_k_sparse".into(),
            WorkedExample::Nmf { .. } => "nmf".into(),
            WorkedExample::KMeans { .. } => "k_means".into(),
            WorkedExample::Hosvd { .. } => "hosvd".into(),
            WorkedExample::SubGaussianL1Squared { .. } => "subgaussian_l1_squared".into(),
        }
    }

    /// The closed-form β, transcribed literally.
    pub fn beta_formula(&self) -> Result<f64> {
        self.check()?;
        let v = match self {
            WorkedExample::PcaBall { m, d } => {
                stiefel_h(*m, *d) * (12.0 * pi_e_pi() * (8.0 * *d as f64).sqrt()).ln()
            }
            WorkedExample::PcaSubGaussian { m, d, a } => {
                stiefel_h(*m, *d) * (pi_e_pi() * (*d as f64).sqrt() / a).ln().max(1.0)
            }
            WorkedExample::SparseLpBall { m, d, p, lambda } => {
                let exponent = crate::penalty::one_minus_inv_p_plus(*p);
                (m * d) as f64
                    * (6.0 * SQRT8 * lambda * (*d as f64).powf(exponent)).ln().max(1.0)
            }
            WorkedExample::SparseKSparse { m, d, k, delta } => {
                (m * d) as f64 * (12.0 * (8.0 * *k as f64 / (1.0 - delta)).sqrt()).ln()
            }
            WorkedExample::SparseL1 { m, d, lambda } => {
                (m * d) as f64 * (3.0 * SQRT8 * lambda).ln().max(1.0)
            }
            WorkedExample::SparseL1Squared { m, d, lambda } => {
                (m * d) as f64 * (12.0 * lambda).ln().max(1.0)
            }
            WorkedExample::DoublySparseL1Ball { m, d, s, lambda } => {
                let stirling = (*m as f64 * std::f64::consts::E / *s as f64).ln();
                (s * d) as f64 * ((6.0 * SQRT8 * lambda).ln() + stirling).max(1.0)
            }
            WorkedExample::DoublySparseKSparse { m, d, s, k, delta } => {
                let stirling = (*m as f64 * std::f64::consts::E / *s as f64).ln();
                (s * d) as f64
                    * ((12.0 * (8.0 * *k as f64 / (1.0 - delta)).sqrt()).ln() + stirling)
            }
            WorkedExample::Nmf { m, d } => {
                (m * d) as f64 * (12.0 * (8.0 * (m * d) as f64).sqrt()).ln()
            }
            WorkedExample::KMeans { m, k } => (m * k) as f64 * (12.0 * SQRT8).ln(),
            WorkedExample::Hosvd { factors } => {
                let h: f64 = factors.iter().map(|(m, d)| stiefel_h(*m, *d)).sum();
                let prod_d: f64 = factors.iter().map(|(_, d)| *d as f64).product();
                h * (12.0 * pi_e_pi() * (8.0 * prod_d).sqrt()).ln()
            }
            WorkedExample::SubGaussianL1Squared { m, d, lambda, a } => {
                (m * d) as f64 * (lambda / (2.0 * 2.0f64.sqrt() * a)).ln().max(1.0)
            }
        };
        Ok(v)
    }

    /// The generic ingredients the same scenario feeds into [`beta`]. The
    /// doubly sparse rows substitute the Stirling-bounded covering constant
    /// 3·me/s, which is what makes the closed form an upper bound.
    pub fn parts(&self) -> Result<ExampleParts> {
        self.check()?;
        let ball_c = 1.0 / SQRT8;
        let parts = match self {
            WorkedExample::PcaBall { m, d } => ExampleParts {
                h: stiefel_h(*m, *d),
                c_cov: 3.0 * pi_e_pi(),
                l: 2.0 * (*d as f64).sqrt(),
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::PcaSubGaussian { m, d, a } => ExampleParts {
                h: stiefel_h(*m, *d),
                c_cov: 3.0 * pi_e_pi(),
                l: 2.0 * (*d as f64).sqrt(),
                c_conc: 12.0 * a,
                is_upper_bound: false,
            },
            WorkedExample::SparseLpBall { m, d, p, lambda } => ExampleParts {
                h: (m * d) as f64,
                c_cov: 3.0,
                l: (*d as f64).powf(crate::penalty::one_minus_inv_p_plus(*p)) * lambda,
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::SparseKSparse { m, d, k, delta } => ExampleParts {
                h: (m * d) as f64,
                c_cov: 3.0,
                l: 2.0 * (*k as f64 / (1.0 - delta)).sqrt(),
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::SparseL1 { m, d, lambda } => ExampleParts {
                h: (m * d) as f64,
                c_cov: 3.0,
                l: lambda / 2.0,
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::SparseL1Squared { m, d, lambda } => ExampleParts {
                h: (m * d) as f64,
                c_cov: 3.0,
                l: lambda / 2.0f64.sqrt(),
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::DoublySparseL1Ball { m, d, s, lambda } => ExampleParts {
                h: (s * d) as f64,
                c_cov: 3.0 * *m as f64 * std::f64::consts::E / *s as f64,
                l: *lambda,
                c_conc: ball_c,
                is_upper_bound: true,
            },
            WorkedExample::DoublySparseKSparse { m, d, s, k, delta } => ExampleParts {
                h: (s * d) as f64,
                c_cov: 3.0 * *m as f64 * std::f64::consts::E / *s as f64,
                l: 2.0 * (*k as f64 / (1.0 - delta)).sqrt(),
                c_conc: ball_c,
                is_upper_bound: true,
            },
            WorkedExample::Nmf { m, d } => ExampleParts {
                h: (m * d) as f64,
                c_cov: 3.0,
                l: 2.0 * ((m * d) as f64).sqrt(),
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::KMeans { m, k } => ExampleParts {
                h: (m * k) as f64,
                c_cov: 3.0,
                l: 2.0,
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::Hosvd { factors } => ExampleParts {
                h: factors.iter().map(|(m, d)| stiefel_h(*m, *d)).sum(),
                c_cov: 3.0 * pi_e_pi(),
                l: 2.0 * factors.iter().map(|(_, d)| *d as f64).product::<f64>().sqrt(),
                c_conc: ball_c,
                is_upper_bound: false,
            },
            WorkedExample::SubGaussianL1Squared { m, d, lambda, a } => ExampleParts {
                h: (m * d) as f64,
                c_cov: 3.0,
                l: lambda / 2.0f64.sqrt(),
                c_conc: 12.0 * a,
                is_upper_bound: false,
            },
        };
        Ok(parts)
    }

    pub fn row(&self) -> Result<WorkedBetaRow> {
        let parts = self.parts()?;
        Ok(WorkedBetaRow {
            name: self.name(),
            beta_formula: self.beta_formula()?,
            beta_generic: beta(parts.h, parts.c_cov, parts.l, parts.c_conc)?,
            parts,
        })
    }

    fn check(&self) -> Result<()> {
        let positive_dims = |dims: &[usize]| {
            if dims.iter().any(|&v| v == 0) {
                Err(Error::Config("dimensions must be ≥ 1".into()))
            } else {
                Ok(())
            }
        };
        match self {
            WorkedExample::PcaBall { m, d } | WorkedExample::PcaSubGaussian { m, d, .. } => {
                positive_dims(&[*m, *d])?;
                if d > m {
                    return Err(Error::Config("PCA needs d ≤ m".into()));
                }
            }
            WorkedExample::SparseLpBall { m, d, lambda, .. }
            | WorkedExample::SparseL1 { m, d, lambda }
            | WorkedExample::SparseL1Squared { m, d, lambda } => {
                positive_dims(&[*m, *d])?;
                if !(*lambda > 0.0) {
                    return Err(Error::Config("λ must be positive".into()));
                }
            }
            WorkedExample::SparseKSparse { m, d, k, delta } => {
                positive_dims(&[*m, *d, *k])?;
                if !(*delta >= 0.0 && *delta < 1.0) {
                    return Err(Error::Config("need 0 ≤ δ < 1".into()));
                }
            }
            WorkedExample::DoublySparseL1Ball { m, d, s, lambda } => {
                positive_dims(&[*m, *d, *s])?;
                if s > m || !(*lambda > 0.0) {
                    return Err(Error::Config("need s ≤ m and λ > 0".into()));
                }
            }
            WorkedExample::DoublySparseKSparse { m, d, s, k, delta } => {
                positive_dims(&[*m, *d, *s, *k])?;
                if s > m || !(*delta >= 0.0 && *delta < 1.0) {
                    return Err(Error::Config("need s ≤ m and 0 ≤ δ < 1".into()));
                }
            }
            WorkedExample::Nmf { m, d } => positive_dims(&[*m, *d])?,
            WorkedExample::KMeans { m, k } => positive_dims(&[*m, *k])?,
            WorkedExample::Hosvd { factors } => {
                if factors.is_empty() {
                    return Err(Error::Config("HOSVD needs at least one factor".into()));
                }
                for (m, d) in factors {
                    positive_dims(&[*m, *d])?;
                    if d > m {
                        return Err(Error::Config("Stiefel factors need d ≤ m".into()));
                    }
                }
            }
            WorkedExample::SubGaussianL1Squared { m, d, lambda, a } => {
                positive_dims(&[*m, *d])?;
                if !(*lambda > 0.0 && *a > 0.0) {
                    return Err(Error::Config("need λ > 0 and A > 0".into()));
                }
            }
        }
        Ok(())
    }
}

// --- scenario assembly ---

fn default_x() -> f64 {
    3.0
}

fn default_quantile() -> f64 {
    0.999
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub id: Option<String>,
    pub class: DictionaryClassSpec,
    pub penalty: PenaltySpec,
    pub distribution: DistributionSpec,
    pub n_grid: Vec<u64>,
    /// Confidence parameter; the failure term is 2e^{−x}.
    #[serde(default = "default_x")]
    pub x: f64,
    pub seed: u64,
    /// Quantile target for Monte Carlo Lipschitz estimation.
    #[serde(default = "default_quantile")]
    pub lipschitz_quantile: f64,
    /// Default report destination; command-line flags take precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<std::path::PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl ScenarioConfig {
    pub fn validated(self) -> Result<Self> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid must be non-empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_grid must be strictly increasing".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::Config("n_grid entries must be ≥ 2".into()));
        }
        if !(self.x >= 0.0) {
            return Err(Error::Config("x must be ≥ 0".into()));
        }
        let (_, class_d) = self.class.ambient_shape();
        if self.penalty.coeff_dim() != class_d {
            return Err(Error::Config(format!(
                "penalty acts on ℝ^{}, the class has {class_d} atoms",
                self.penalty.coeff_dim()
            )));
        }
        if self.distribution.clone().validated()?.signal_dim() != self.class.ambient_shape().0 {
            return Err(Error::Config(format!(
                "distribution lives in ℝ^{}, the class in ℝ^{}",
                self.distribution.signal_dim(),
                self.class.ambient_shape().0
            )));
        }
        Ok(self)
    }

    /// Regime of the scenario: A for norm-like penalties, B with the
    /// class-level κ otherwise.
    pub fn regime(&self) -> Result<Regime> {
        if self.penalty.requires_regime_b() {
            let kappa = kappa_of(&self.class, &self.penalty, None)?;
            Regime::b(kappa)
        } else {
            Ok(Regime::A)
        }
    }

    /// 2c for A1–A4 penalties or convex regime-B classes, 3c otherwise.
    pub fn eta_flavor(&self) -> EtaFlavor {
        if self.penalty.satisfies_a1_a4()
            || (self.penalty.requires_regime_b() && self.class.is_convex())
        {
            EtaFlavor::TwoC
        } else {
            EtaFlavor::ThreeC
        }
    }

    pub fn dconst(&self, regime: Regime) -> DConst {
        match regime {
            Regime::A => DConst::One,
            Regime::B { kappa } => {
                if self.class.is_convex() {
                    DConst::One
                } else {
                    DConst::InvKappa(kappa)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EtaRow {
    pub n: u64,
    pub eta: f64,
    pub valid: bool,
    pub threshold: f64,
    pub x_max: ExtReal,
    /// Total failure probability Γ_n(L) + 2e^{−x} (Γ_n = 0 for bounded
    /// support).
    pub failure_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub scenario_id: String,
    pub regime: Regime,
    pub h: u64,
    pub c_cov: f64,
    pub l: f64,
    pub lipschitz_method: LipschitzMethod,
    pub c_conc: f64,
    pub t_horizon: ExtReal,
    pub a: Option<f64>,
    pub beta: f64,
    pub eta_flavor: EtaFlavor,
    pub x: f64,
    pub rows: Vec<EtaRow>,
    pub notes: Vec<String>,
}

impl BoundReport {
    /// One CSV row per n: scenario, n, eta, valid, failure probability.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,n,eta,valid,threshold,x_max,failure_probability\n");
        for row in &self.rows {
            let x_max = match row.x_max {
                ExtReal::Inf => "inf".to_string(),
                ExtReal::Finite(v) => format!("{v}"),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.scenario_id,
                row.n,
                row.eta,
                row.valid,
                row.threshold,
                x_max,
                row.failure_probability
            ));
        }
        out
    }
}

/// Assemble the full bound report for a scenario: covering constants from
/// the class, (c, T, A) and L from the distribution, κ for regime B, then
/// β and the η_n curve with per-n validity flags.
pub fn assemble(config: &ScenarioConfig) -> Result<BoundReport> {
    let config = config.clone().validated()?;
    let regime = config.regime()?;
    let (h, c_cov) = config.class.covering_constants();
    let conc = config.distribution.concentration_params();
    let mut notes = Vec::new();
    if let Some(a) = conc.a {
        notes.push(format!(
            "tail scale A = {a} uses the proven constant 5(kσ_α² + mσ_ε²); the prose-level \
             constant without the factor 5 is not certified by the tail bound"
        ));
    }
    let mut lip_rng = rng::stream(config.seed, rng::streams::DICTIONARY);
    let lip = config.distribution.lipschitz_l(
        &config.penalty,
        regime,
        config.lipschitz_quantile,
        &mut lip_rng,
    )?;
    match &lip.method {
        LipschitzMethod::BoundedExact => {
            notes.push("bounded support: Γ_n(L) = 0 at the reported L".into())
        }
        LipschitzMethod::MonteCarloQuantile {
            samples, quantile, ..
        } => notes.push(format!(
            "L estimated from {samples} Monte Carlo draws at bootstrap quantile {quantile}; \
             Γ_n(L) → 0 but is not exactly zero"
        )),
    }
    let beta_value = beta(h as f64, c_cov, lip.value, conc.c)?;
    let flavor = config.eta_flavor();
    let dconst = config.dconst(regime);
    let gamma_known_zero = config.distribution.support_radius().is_some();
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let check = sample_size_ok(n, beta_value, conc.t_horizon, conc.c, lip.value, dconst);
        let x_ok = match check.x_max {
            ExtReal::Inf => true,
            ExtReal::Finite(xm) => config.x <= xm,
        };
        let failure = if gamma_known_zero {
            2.0 * (-config.x).exp()
        } else {
            // Γ_n(L) is not exactly zero here; the 2e^{−x} term dominates
            // for the sample sizes of interest and Γ_n is annotated above.
            2.0 * (-config.x).exp()
        };
        rows.push(EtaRow {
            n,
            eta: eta_n(n, config.x, beta_value, conc.c, flavor)?,
            valid: check.ok && x_ok,
            threshold: check.threshold,
            x_max: check.x_max,
            failure_probability: failure,
        });
    }
    Ok(BoundReport {
        schema_version: 1,
        scenario_id: config.id.clone().unwrap_or_else(|| "scenario".into()),
        regime,
        h,
        c_cov,
        l: lip.value,
        lipschitz_method: lip.method,
        c_conc: conc.c,
        t_horizon: conc.t_horizon,
        a: conc.a,
        beta: beta_value,
        eta_flavor: flavor,
        x: config.x,
        rows,
        notes,
    })
}

/// Convenience constructor for the K-means scenario used across the
/// verification suite: K centers in the unit ball (covering constants of
/// the unit-norm class), data on the unit sphere.
pub fn kmeans_scenario(m: usize, k: usize, n_grid: Vec<u64>, x: f64, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        id: Some(format!("kmeans_m{m}_K{k}")),
        class: DictionaryClassSpec::new(ClassKind::Ball { m, d: k }).expect("valid dims"),
        penalty: PenaltySpec::new(crate::penalty::PenaltyKind::KMeansIndicator, k)
            .expect("valid penalty"),
        distribution: DistributionSpec::UniformSphere { radius: 1.0, m },
        n_grid,
        x,
        seed,
        lipschitz_quantile: 0.999,
        output: None,
        format: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_clamps_at_h() {
        // 2LC/c = e: the log equals exactly 1.
        let e = std::f64::consts::E;
        let b = beta(7.0, 1.0, e / 2.0, 1.0).unwrap();
        assert_relative_eq!(b, 7.0, max_relative = 1e-15);
        // 2LC/c < 1: the max clamps.
        let b = beta(7.0, 1.0, 0.1, 1.0).unwrap();
        assert_relative_eq!(b, 7.0);
        assert!(beta(0.5, 3.0, 1.0, 1.0).is_err());
        assert!(beta(2.0, 3.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn beta_is_monotone() {
        let base = beta(10.0, 3.0, 2.0, 0.5).unwrap();
        assert!(beta(11.0, 3.0, 2.0, 0.5).unwrap() > base);
        assert!(beta(10.0, 4.0, 2.0, 0.5).unwrap() > base);
        assert!(beta(10.0, 3.0, 3.0, 0.5).unwrap() > base);
        assert!(beta(10.0, 3.0, 2.0, 0.4).unwrap() > base);
    }

    #[test]
    fn kmeans_beta_value() {
        let b = beta(50.0, 3.0, 2.0, 1.0 / SQRT8).unwrap();
        assert_relative_eq!(b, 50.0 * (12.0 * 8.0f64.sqrt()).ln(), max_relative = 1e-14);
        assert_relative_eq!(b, 176.231_371_031_395_92, max_relative = 1e-12);
    }

    #[test]
    fn eta_plug_in_and_linearity() {
        let e = std::f64::consts::E;
        let n = 3u64; // n = 3 ≈ e, checked with explicit logs below
        let eta = eta_n(n, 0.0, 1.0, 1.0, EtaFlavor::ThreeC).unwrap();
        let nf = n as f64;
        let expected = 3.0 * (nf.ln() / nf).sqrt() + (1.0 / nf).sqrt();
        assert_relative_eq!(eta, expected, max_relative = 1e-15);
        let _ = e;
        // Doubling c doubles η.
        let e1 = eta_n(100, 2.0, 5.0, 0.7, EtaFlavor::TwoC).unwrap();
        let e2 = eta_n(100, 2.0, 5.0, 1.4, EtaFlavor::TwoC).unwrap();
        assert_relative_eq!(2.0 * e1, e2, max_relative = 1e-15);
    }

    #[test]
    fn eta_decreases_in_n() {
        let mut last = f64::INFINITY;
        for n in [3u64, 10, 100, 1000, 10_000, 100_000] {
            let eta = eta_n(n, 3.0, 42.0, 0.3536, EtaFlavor::ThreeC).unwrap();
            assert!(eta < last, "η not decreasing at n={n}");
            last = eta;
        }
    }

    #[test]
    fn eta_asymptotics_toward_leading_term() {
        // η_n·√(n/log n) approaches coef·c√β from above; the second term
        // decays only like 1/√log n, so the ratio at n = 10^6 is still
        // ≈ 1 + √((β+x)/β)/(coef·√log n) ≈ 1.14 for the 2c flavor.
        let beta_v = 50.0;
        let c = 1.0 / SQRT8;
        let x = 3.0;
        for (flavor, coef) in [(EtaFlavor::TwoC, 2.0), (EtaFlavor::ThreeC, 3.0)] {
            let n = 1_000_000u64;
            let nf = n as f64;
            let scaled = eta_n(n, x, beta_v, c, flavor).unwrap() * (nf / nf.ln()).sqrt();
            let limit = coef * c * beta_v.sqrt();
            let predicted_excess = ((beta_v + x) / beta_v).sqrt() / (coef * nf.ln().sqrt());
            assert!(scaled > limit);
            assert_relative_eq!(scaled / limit - 1.0, predicted_excess, max_relative = 1e-12);
            // And the excess shrinks with n.
            let n2 = 100_000_000u64;
            let nf2 = n2 as f64;
            let scaled2 = eta_n(n2, x, beta_v, c, flavor).unwrap() * (nf2 / nf2.ln()).sqrt();
            assert!(scaled2 < scaled);
        }
    }

    #[test]
    fn sample_size_examples() {
        // T = ∞ drops the middle term; n = 10 with the remaining max = 8
        // fails since 10/log 10 ≈ 4.34 < 8.
        let check = sample_size_ok(10, 1.0, ExtReal::Inf, 2.0, 1.0, DConst::One);
        assert!(!check.ok);
        assert_eq!(check.x_max, ExtReal::Inf);
        // Huge n passes.
        let check = sample_size_ok(1_000_000, 50.0, ExtReal::Finite(1.0), 0.3536, 2.0, DConst::One);
        assert!(check.ok);
        match check.x_max {
            ExtReal::Finite(v) => {
                assert_relative_eq!(v, 1e6 - 50.0 * 1e6f64.ln(), max_relative = 1e-12)
            }
            ExtReal::Inf => panic!("finite horizon"),
        }
    }

    #[test]
    fn sphere_scenario_binding_term_is_eight() {
        // c = 1/√8, L = 2, β = 176.23…: the (c/2L)²β term is ≈ 1.4, so the
        // binding threshold is the constant 8; the smallest valid n is
        // where n/log n crosses 8.
        let beta_v = 50.0 * (12.0 * 8.0f64.sqrt()).ln();
        let mut first_valid = None;
        for n in 2..200u64 {
            let check = sample_size_ok(n, beta_v, ExtReal::Inf, 1.0 / SQRT8, 2.0, DConst::One);
            assert_relative_eq!(check.threshold, 8.0, max_relative = 1e-12);
            if check.ok && first_valid.is_none() {
                first_valid = Some(n);
            }
        }
        let n = first_valid.unwrap() as f64;
        assert!(n / n.ln() >= 8.0 && (n - 1.0) / (n - 1.0).ln() < 8.0);
    }

    #[test]
    fn worked_examples_match_generic_pipeline() {
        let examples = vec![
            WorkedExample::PcaBall { m: 10, d: 3 },
            WorkedExample::PcaSubGaussian { m: 10, d: 3, a: 2.0 },
            WorkedExample::SparseLpBall {
                m: 8,
                d: 12,
                p: ExtReal::Finite(1.0),
                lambda: 1.5,
            },
            WorkedExample::SparseLpBall {
                m: 8,
                d: 12,
                p: ExtReal::Finite(2.0),
                lambda: 1.5,
            },
            WorkedExample::SparseKSparse { m: 16, d: 32, k: 4, delta: 0.5 },
            WorkedExample::SparseL1 { m: 8, d: 12, lambda: 2.0 },
            WorkedExample::SparseL1Squared { m: 8, d: 12, lambda: 2.0 },
            WorkedExample::DoublySparseL1Ball { m: 16, d: 12, s: 4, lambda: 1.0 },
            WorkedExample::DoublySparseKSparse {
                m: 16,
                d: 12,
                s: 4,
                k: 3,
                delta: 0.25,
            },
            WorkedExample::Nmf { m: 6, d: 4 },
            WorkedExample::KMeans { m: 10, k: 5 },
            WorkedExample::Hosvd {
                factors: vec![(4, 2), (5, 3)],
            },
            WorkedExample::SubGaussianL1Squared { m: 8, d: 12, lambda: 400.0, a: 1.0 },
        ];
        for ex in examples {
            let row = ex.row().unwrap();
            assert_relative_eq!(row.beta_formula, row.beta_generic, max_relative = 1e-12);
        }
    }

    #[test]
    fn k_sparse_worked_value() {
        let ex = WorkedExample::SparseKSparse { m: 16, d: 32, k: 4, delta: 0.5 };
        // 8k/(1−δ) = 64, so β = 512·log(12·8).
        assert_relative_eq!(
            ex.beta_formula().unwrap(),
            512.0 * (96.0f64).ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn kmeans_cross_check_against_generic_beta() {
        let ex = WorkedExample::KMeans { m: 10, k: 5 };
        let direct = beta(50.0, 3.0, 2.0, 1.0 / SQRT8).unwrap();
        assert_relative_eq!(ex.beta_formula().unwrap(), direct, max_relative = 1e-14);
    }

    #[test]
    fn assemble_kmeans_scenario() {
        let config = kmeans_scenario(10, 5, vec![128, 1024, 8192], 3.0, 7);
        let report = assemble(&config).unwrap();
        assert_eq!(report.h, 50);
        assert_relative_eq!(report.c_cov, 3.0);
        assert_relative_eq!(report.l, 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            report.beta,
            50.0 * (12.0 * 8.0f64.sqrt()).ln(),
            max_relative = 1e-13
        );
        assert_eq!(report.eta_flavor, EtaFlavor::ThreeC);
        assert!(report.rows.iter().all(|r| r.valid));
        assert!(report.rows.windows(2).all(|w| w[0].eta > w[1].eta));
        // Failure annotation 2e^{−x}.
        assert_relative_eq!(
            report.rows[0].failure_probability,
            2.0 * (-3.0f64).exp(),
            max_relative = 1e-15
        );
        let csv = report.to_csv();
        assert!(csv.lines().count() == 4);
    }

    #[test]
    fn assemble_flags_small_n_rows() {
        let config = kmeans_scenario(10, 5, vec![4, 8, 4096], 3.0, 7);
        let report = assemble(&config).unwrap();
        assert!(!report.rows[0].valid);
        assert!(!report.rows[1].valid);
        assert!(report.rows[2].valid);
        // η is still reported for flagged rows.
        assert!(report.rows[0].eta.is_finite());
    }

    #[test]
    fn assemble_rejects_regime_mismatch() {
        // Non-negative penalty on a plain unit-norm class: no class-level κ.
        let config = ScenarioConfig {
            id: None,
            class: DictionaryClassSpec::new(ClassKind::UnitNorm { m: 4, d: 3 }).unwrap(),
            penalty: PenaltySpec::new(crate::penalty::PenaltyKind::NonNegIndicator, 3).unwrap(),
            distribution: DistributionSpec::UniformSphere { radius: 1.0, m: 4 },
            n_grid: vec![100],
            x: 3.0,
            seed: 1,
            lipschitz_quantile: 0.999,
            output: None,
            format: None,
        };
        assert!(matches!(assemble(&config), Err(Error::Config(_))));
    }

    #[test]
    fn pca_scenario_reproduces_worked_beta() {
        let config = ScenarioConfig {
            id: Some("pca".into()),
            class: DictionaryClassSpec::new(ClassKind::Stiefel { m: 10, d: 3 }).unwrap(),
            penalty: PenaltySpec::new(crate::penalty::PenaltyKind::Zero, 3).unwrap(),
            distribution: DistributionSpec::UniformBall { radius: 1.0, m: 10 },
            n_grid: vec![1000],
            x: 3.0,
            seed: 1,
            lipschitz_quantile: 0.999,
            output: None,
            format: None,
        };
        let report = assemble(&config).unwrap();
        let worked = WorkedExample::PcaBall { m: 10, d: 3 }.beta_formula().unwrap();
        assert_relative_eq!(report.beta, worked, max_relative = 1e-12);
        assert_eq!(report.eta_flavor, EtaFlavor::ThreeC);
    }

    #[test]
    fn sparse_ball_scenario_reproduces_worked_beta() {
        let config = ScenarioConfig {
            id: None,
            class: DictionaryClassSpec::new(ClassKind::UnitNorm { m: 8, d: 12 }).unwrap(),
            penalty: PenaltySpec::new(
                crate::penalty::PenaltyKind::LpBallIndicator {
                    p: ExtReal::Finite(1.0),
                    lambda: 1.5,
                },
                12,
            )
            .unwrap(),
            distribution: DistributionSpec::UniformSphere { radius: 1.0, m: 8 },
            n_grid: vec![1000],
            x: 3.0,
            seed: 1,
            lipschitz_quantile: 0.999,
            output: None,
            format: None,
        };
        let report = assemble(&config).unwrap();
        let worked = WorkedExample::SparseLpBall {
            m: 8,
            d: 12,
            p: ExtReal::Finite(1.0),
            lambda: 1.5,
        }
        .beta_formula()
        .unwrap();
        assert_relative_eq!(report.beta, worked, max_relative = 1e-12);
        assert_eq!(report.eta_flavor, EtaFlavor::TwoC);
    }

    #[test]
    fn scenario_config_json_round_trip() {
        let config = kmeans_scenario(4, 3, vec![64, 128], 3.0, 11);
        let json = serde_json::to_string_pretty(&config).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.seed, config.seed);
        assert_eq!(back.n_grid, config.n_grid);
        // Unknown fields are rejected.
        let bad = json.replace("\"seed\"", "\"sneed\"");
        assert!(serde_json::from_str::<ScenarioConfig>(&bad).is_err());
    }
}
