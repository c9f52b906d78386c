//! Coefficient penalties g and their sublevel-set envelopes ḡ.
//!
//! A penalty is either "norm-like" (non-negative, lower semi-continuous,
//! coercive, zero at the origin — regime A) or an indicator that only gains a
//! finite envelope jointly with a dictionary class through a restricted
//! eigenvalue constant κ (regime B). The envelope
//!
//! ```text
//! regime A:  ḡ(t) = sup { ‖α‖₁ : g(α) ≤ t }
//! regime B:  ḡ(t) = 2 √(2t/κ)
//! ```
//!
//! drives every Lipschitz constant in this crate. Closed forms are
//! implemented in [`PenaltySpec::gbar`]; [`gbar_oracle`] recomputes the
//! regime-A supremum by brute force on a grid for cross-checking.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// ℓp exponent, `0 < p ≤ ∞`.
pub type PExp = ExtReal;

/// Resolution of a brute-force grid search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per coordinate axis. Odd counts include the origin exactly.
    pub points_per_dim: usize,
}

impl GridSpec {
    pub fn new(points_per_dim: usize) -> Self {
        GridSpec { points_per_dim }
    }
}

/// The penalty family, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum PenaltyKind {
    /// `g(α) = ‖α/λ‖_p^r`, covering norms, quasi-norms and their powers.
    LpNormPower { p: PExp, r: f64, lambda: f64 },
    /// `g(α) = χ(‖α‖_p ≤ λ)`.
    LpBallIndicator { p: PExp, lambda: f64 },
    /// `g(α) = χ(‖α‖₀ ≤ k)`. Regime B.
    KSparseIndicator { k: usize },
    /// `g(α) = χ(α ≥ 0)`. Regime B.
    NonNegIndicator,
    /// `g(α) = χ(‖α‖₀ = 1) + χ(Σ αᵢ = 1)`: exactly one entry, equal to one.
    KMeansIndicator,
    /// `g ≡ 0`; handled through the B machinery as k-sparse with k = d.
    Zero,
}

/// A penalty together with the coefficient dimension it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpec {
    kind: PenaltyKind,
    coeff_dim: usize,
}

/// Which assumption bundle the envelope of a penalty comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Regime {
    A,
    B { kappa: f64 },
}

impl Regime {
    pub fn b(kappa: f64) -> Result<Self> {
        if kappa > 0.0 && kappa.is_finite() {
            Ok(Regime::B { kappa })
        } else {
            Err(Error::Config(format!("kappa must be positive, got {kappa}")))
        }
    }

    pub fn kappa(self) -> Option<f64> {
        match self {
            Regime::A => None,
            Regime::B { kappa } => Some(kappa),
        }
    }
}

impl PenaltySpec {
    pub fn new(kind: PenaltyKind, coeff_dim: usize) -> Result<Self> {
        if coeff_dim == 0 {
            return Err(Error::Config("coefficient dimension must be positive".into()));
        }
        match &kind {
            PenaltyKind::LpNormPower { p, r, lambda } => {
                check_p(*p)?;
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(Error::Config(format!("r must be positive, got {r}")));
                }
                check_lambda(*lambda)?;
            }
            PenaltyKind::LpBallIndicator { p, lambda } => {
                check_p(*p)?;
                check_lambda(*lambda)?;
            }
            PenaltyKind::KSparseIndicator { k } => {
                if *k == 0 || *k > coeff_dim {
                    return Err(Error::Config(format!(
                        "sparsity k = {k} must satisfy 1 ≤ k ≤ d = {coeff_dim}"
                    )));
                }
            }
            PenaltyKind::NonNegIndicator | PenaltyKind::KMeansIndicator | PenaltyKind::Zero => {}
        }
        Ok(PenaltySpec { kind, coeff_dim })
    }

    pub fn kind(&self) -> &PenaltyKind {
        &self.kind
    }

    pub fn coeff_dim(&self) -> usize {
        self.coeff_dim
    }

    /// True for penalties whose envelope needs a regime-B κ.
    pub fn requires_regime_b(&self) -> bool {
        matches!(
            self.kind,
            PenaltyKind::KSparseIndicator { .. } | PenaltyKind::NonNegIndicator | PenaltyKind::Zero
        )
    }

    /// True for penalties satisfying the full norm-like bundle (A1–A4).
    /// `KMeansIndicator` is excluded: it is not zero at the origin.
    pub fn satisfies_a1_a4(&self) -> bool {
        matches!(
            self.kind,
            PenaltyKind::LpNormPower { .. } | PenaltyKind::LpBallIndicator { .. }
        )
    }

    /// Evaluate g(α) with exact membership comparisons (tolerance 0).
    pub fn eval(&self, alpha: &DVector<f64>) -> Result<f64> {
        self.eval_with_tol(alpha, 0.0)
    }

    /// Evaluate g(α). Indicator membership uses absolute comparisons against
    /// `tol`; the default of 0 keeps classification bit-reproducible.
    pub fn eval_with_tol(&self, alpha: &DVector<f64>, tol: f64) -> Result<f64> {
        if alpha.len() != self.coeff_dim {
            return Err(Error::DimMismatch(format!(
                "coefficient vector has length {}, spec expects {}",
                alpha.len(),
                self.coeff_dim
            )));
        }
        let value = match &self.kind {
            PenaltyKind::LpNormPower { p, r, lambda } => {
                (lp_norm(alpha, *p) / lambda).powf(*r)
            }
            PenaltyKind::LpBallIndicator { p, lambda } => {
                indicator(lp_norm(alpha, *p) <= lambda + tol)
            }
            PenaltyKind::KSparseIndicator { k } => indicator(l0(alpha, tol) <= *k),
            PenaltyKind::NonNegIndicator => indicator(alpha.iter().all(|&v| v >= -tol)),
            PenaltyKind::KMeansIndicator => {
                indicator(l0(alpha, tol) == 1 && (alpha.sum() - 1.0).abs() <= tol)
            }
            PenaltyKind::Zero => 0.0,
        };
        Ok(value)
    }

    /// The envelope ḡ(t). Regime B is required for k-sparse, non-negative
    /// and zero penalties; regime A for the rest.
    pub fn gbar(&self, t: f64, regime: Regime) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Config(format!("gbar needs t ≥ 0, got {t}")));
        }
        let d = self.coeff_dim as f64;
        match (&self.kind, regime) {
            (PenaltyKind::LpNormPower { p, r, lambda }, Regime::A) => {
                Ok(d.powf(one_minus_inv_p_plus(*p)) * lambda * t.powf(1.0 / r))
            }
            (PenaltyKind::LpBallIndicator { p, lambda }, Regime::A) => {
                Ok(d.powf(one_minus_inv_p_plus(*p)) * lambda)
            }
            (PenaltyKind::KMeansIndicator, Regime::A) => Ok(1.0),
            (
                PenaltyKind::KSparseIndicator { .. }
                | PenaltyKind::NonNegIndicator
                | PenaltyKind::Zero,
                Regime::B { kappa },
            ) => Ok(2.0 * (2.0 * t / kappa).sqrt()),
            (kind, regime) => Err(Error::Config(format!(
                "penalty {kind:?} cannot be used with regime {regime:?}"
            ))),
        }
    }
}

fn check_p(p: PExp) -> Result<()> {
    match p {
        ExtReal::Finite(v) if v > 0.0 => Ok(()),
        ExtReal::Inf => Ok(()),
        ExtReal::Finite(v) => Err(Error::Config(format!("p must be positive, got {v}"))),
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("lambda must be positive, got {lambda}")))
    }
}

fn indicator(member: bool) -> f64 {
    if member {
        0.0
    } else {
        f64::INFINITY
    }
}

fn l0(alpha: &DVector<f64>, tol: f64) -> usize {
    alpha.iter().filter(|v| v.abs() > tol).count()
}

/// `‖α‖_p` for 0 < p ≤ ∞ (a quasi-norm for p < 1).
pub fn lp_norm(alpha: &DVector<f64>, p: PExp) -> f64 {
    match p {
        ExtReal::Inf => alpha.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        ExtReal::Finite(p) if p == 1.0 => alpha.iter().map(|v| v.abs()).sum(),
        ExtReal::Finite(p) if p == 2.0 => alpha.norm(),
        ExtReal::Finite(p) => alpha
            .iter()
            .map(|v| v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
    }
}

/// The exponent `(1 − 1/p)₊`, with the p = ∞ limit equal to 1.
pub fn one_minus_inv_p_plus(p: PExp) -> f64 {
    match p {
        ExtReal::Inf => 1.0,
        ExtReal::Finite(p) => (1.0 - 1.0 / p).max(0.0),
    }
}

/// Brute-force evaluation of the regime-A envelope: maximize ‖α‖₁ over a
/// uniform grid of the sublevel set {g ≤ t}. Never exceeds the closed form
/// and converges to it as the grid refines.
///
/// Supports the ℓp families only and refuses d > 4 (the grid is exponential
/// in d).
pub fn gbar_oracle(spec: &PenaltySpec, t: f64, grid: &GridSpec) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Config(format!("gbar_oracle needs t ≥ 0, got {t}")));
    }
    let d = spec.coeff_dim();
    if d > 4 {
        return Err(Error::Refusal(format!(
            "grid oracle is exponential in d; d = {d} > 4"
        )));
    }
    if grid.points_per_dim < 2 {
        return Err(Error::Config("grid needs at least 2 points per axis".into()));
    }
    // Box radius: the sublevel set lives in [-rho, rho]^d.
    let (p, rho) = match spec.kind() {
        PenaltyKind::LpNormPower { p, r, lambda } => (*p, lambda * t.powf(1.0 / r)),
        PenaltyKind::LpBallIndicator { p, lambda } => (*p, *lambda),
        kind => {
            return Err(Error::Refusal(format!(
                "grid oracle supports the ℓp penalty families only, got {kind:?}"
            )))
        }
    };
    if rho == 0.0 {
        return Ok(0.0);
    }
    let n = grid.points_per_dim;
    let axis: Vec<f64> = (0..n)
        .map(|i| -rho + 2.0 * rho * i as f64 / (n - 1) as f64)
        .collect();
    let axis_abs: Vec<f64> = axis.iter().map(|v| v.abs()).collect();
    // Membership reduces to sum(|α_i|^p) ≤ rho^p for finite p; for p = ∞
    // every box point is feasible. Per-axis power tables keep the scan cheap.
    let (axis_pow, threshold) = match p {
        ExtReal::Inf => (vec![0.0; n], f64::INFINITY),
        ExtReal::Finite(pv) => (
            axis_abs.iter().map(|a| a.powf(pv)).collect(),
            rho.powf(pv) * (1.0 + 1e-12),
        ),
    };
    let mut best = 0.0f64;
    scan(&axis_abs, &axis_pow, threshold, d, 0.0, 0.0, &mut best);
    Ok(best)
}

fn scan(
    axis_abs: &[f64],
    axis_pow: &[f64],
    threshold: f64,
    remaining: usize,
    sum_pow: f64,
    sum_abs: f64,
    best: &mut f64,
) {
    if sum_pow > threshold {
        return;
    }
    if remaining == 0 {
        if sum_abs > *best {
            *best = sum_abs;
        }
        return;
    }
    for i in 0..axis_abs.len() {
        scan(
            axis_abs,
            axis_pow,
            threshold,
            remaining - 1,
            sum_pow + axis_pow[i],
            sum_abs + axis_abs[i],
            best,
        );
    }
}

// --- serde: flat JSON object {"variant", "p", "r", "lambda", "k", "d"} ---

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PenaltyRepr {
    variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<PExp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    d: usize,
}

impl Serialize for PenaltySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut repr = PenaltyRepr {
            variant: String::new(),
            p: None,
            r: None,
            lambda: None,
            k: None,
            d: self.coeff_dim,
        };
        match &self.kind {
            PenaltyKind::LpNormPower { p, r, lambda } => {
                repr.variant = "LpNormPower".into();
                repr.p = Some(*p);
                repr.r = Some(*r);
                repr.lambda = Some(*lambda);
            }
            PenaltyKind::LpBallIndicator { p, lambda } => {
                repr.variant = "LpBallIndicator".into();
                repr.p = Some(*p);
                repr.lambda = Some(*lambda);
            }
            PenaltyKind::KSparseIndicator { k } => {
                repr.variant = "KSparseIndicator".into();
                repr.k = Some(*k);
            }
            PenaltyKind::NonNegIndicator => repr.variant = "NonNegIndicator".into(),
            PenaltyKind::KMeansIndicator => repr.variant = "KMeansIndicator".into(),
            PenaltyKind::Zero => repr.variant = "Zero".into(),
        }
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PenaltySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = PenaltyRepr::deserialize(d)?;
        let missing = |f: &str| DeError::custom(format!("{}: missing field {f}", repr.variant));
        let kind = match repr.variant.as_str() {
            "LpNormPower" => PenaltyKind::LpNormPower {
                p: repr.p.ok_or_else(|| missing("p"))?,
                r: repr.r.ok_or_else(|| missing("r"))?,
                lambda: repr.lambda.ok_or_else(|| missing("lambda"))?,
            },
            "LpBallIndicator" => PenaltyKind::LpBallIndicator {
                p: repr.p.ok_or_else(|| missing("p"))?,
                lambda: repr.lambda.ok_or_else(|| missing("lambda"))?,
            },
            "KSparseIndicator" => PenaltyKind::KSparseIndicator {
                k: repr.k.ok_or_else(|| missing("k"))?,
            },
            "NonNegIndicator" => PenaltyKind::NonNegIndicator,
            "KMeansIndicator" => PenaltyKind::KMeansIndicator,
            "Zero" => PenaltyKind::Zero,
            other => return Err(DeError::custom(format!("unknown penalty variant {other:?}"))),
        };
        PenaltySpec::new(kind, repr.d).map_err(|e| DeError::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lasso(lambda: f64, d: usize) -> PenaltySpec {
        PenaltySpec::new(
            PenaltyKind::LpNormPower {
                p: ExtReal::Finite(1.0),
                r: 1.0,
                lambda,
            },
            d,
        )
        .unwrap()
    }

    #[test]
    fn eval_l1_over_lambda() {
        let spec = lasso(2.0, 2);
        let v = spec.eval(&DVector::from_vec(vec![1.0, -1.0])).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn eval_k_sparse() {
        let spec = PenaltySpec::new(PenaltyKind::KSparseIndicator { k: 1 }, 3).unwrap();
        assert_eq!(spec.eval(&DVector::from_vec(vec![0.5, 0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(
            spec.eval(&DVector::from_vec(vec![0.5, 0.1, 0.0])).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn eval_k_means() {
        let spec = PenaltySpec::new(PenaltyKind::KMeansIndicator, 3).unwrap();
        assert_eq!(spec.eval(&DVector::from_vec(vec![0.0, 1.0, 0.0])).unwrap(), 0.0);
        assert_eq!(
            spec.eval(&DVector::from_vec(vec![0.5, 0.5, 0.0])).unwrap(),
            f64::INFINITY
        );
        // one nonzero entry but not equal to one
        assert_eq!(
            spec.eval(&DVector::from_vec(vec![0.5, 0.0, 0.0])).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn eval_dimension_mismatch() {
        let spec = lasso(1.0, 3);
        assert!(matches!(
            spec.eval(&DVector::from_vec(vec![1.0])),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn gbar_ball_is_constant() {
        let spec = PenaltySpec::new(
            PenaltyKind::LpBallIndicator {
                p: ExtReal::Finite(2.0),
                lambda: 1.0,
            },
            4,
        )
        .unwrap();
        for t in [0.0, 0.3, 7.0] {
            assert_relative_eq!(spec.gbar(t, Regime::A).unwrap(), 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn gbar_norm_power_at_zero() {
        let spec = PenaltySpec::new(
            PenaltyKind::LpNormPower {
                p: ExtReal::Finite(1.0),
                r: 1.0,
                lambda: 3.0,
            },
            5,
        )
        .unwrap();
        assert_eq!(spec.gbar(0.0, Regime::A).unwrap(), 0.0);
    }

    #[test]
    fn gbar_regime_b_k_sparse() {
        let spec = PenaltySpec::new(PenaltyKind::KSparseIndicator { k: 2 }, 6).unwrap();
        let kappa = (1.0 - 0.0) / 2.0;
        let got = spec.gbar(0.5, Regime::b(kappa).unwrap()).unwrap();
        assert_relative_eq!(got, 2.0 * 2.0f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn gbar_regime_mismatch_is_config_error() {
        let spec = PenaltySpec::new(PenaltyKind::KSparseIndicator { k: 2 }, 6).unwrap();
        assert!(matches!(spec.gbar(1.0, Regime::A), Err(Error::Config(_))));
        let ball = PenaltySpec::new(
            PenaltyKind::LpBallIndicator {
                p: ExtReal::Inf,
                lambda: 1.0,
            },
            3,
        )
        .unwrap();
        assert!(matches!(
            ball.gbar(1.0, Regime::b(0.5).unwrap()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn p_inf_uses_limit_exponent() {
        let spec = PenaltySpec::new(
            PenaltyKind::LpBallIndicator {
                p: ExtReal::Inf,
                lambda: 2.0,
            },
            3,
        )
        .unwrap();
        assert_relative_eq!(spec.gbar(1.0, Regime::A).unwrap(), 6.0, max_relative = 1e-15);
    }

    #[test]
    fn oracle_l2_disc() {
        let spec = PenaltySpec::new(
            PenaltyKind::LpBallIndicator {
                p: ExtReal::Finite(2.0),
                lambda: 1.0,
            },
            2,
        )
        .unwrap();
        let oracle = gbar_oracle(&spec, 1.0, &GridSpec::new(801)).unwrap();
        let closed = spec.gbar(1.0, Regime::A).unwrap();
        assert!(oracle <= closed * (1.0 + 1e-12));
        assert!((closed - oracle) / closed <= 0.01, "gap too large: {oracle} vs {closed}");
        assert_relative_eq!(oracle, 2.0f64.sqrt(), max_relative = 0.01);
    }

    #[test]
    fn oracle_l1_squared() {
        let spec = PenaltySpec::new(
            PenaltyKind::LpNormPower {
                p: ExtReal::Finite(1.0),
                r: 2.0,
                lambda: 1.0,
            },
            2,
        )
        .unwrap();
        let oracle = gbar_oracle(&spec, 4.0, &GridSpec::new(801)).unwrap();
        assert_relative_eq!(oracle, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn oracle_at_zero() {
        let spec = lasso(1.0, 3);
        assert_eq!(gbar_oracle(&spec, 0.0, &GridSpec::new(11)).unwrap(), 0.0);
    }

    #[test]
    fn oracle_refuses_large_dimension() {
        let spec = lasso(1.0, 5);
        assert!(matches!(
            gbar_oracle(&spec, 1.0, &GridSpec::new(11)),
            Err(Error::Refusal(_))
        ));
    }

    #[test]
    fn serde_flat_schema_with_inf() {
        let spec = PenaltySpec::new(
            PenaltyKind::LpBallIndicator {
                p: ExtReal::Inf,
                lambda: 1.5,
            },
            4,
        )
        .unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"p\":\"inf\""), "{json}");
        let back: PenaltySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let ks: PenaltySpec =
            serde_json::from_str(r#"{"variant":"KSparseIndicator","k":2,"d":5}"#).unwrap();
        assert_eq!(ks.kind(), &PenaltyKind::KSparseIndicator { k: 2 });
    }

    proptest! {
        #[test]
        fn gbar_non_decreasing_in_t(
            t1 in 0.0..10.0f64,
            t2 in 0.0..10.0f64,
            lambda in 0.1..5.0f64,
            r in 0.5..3.0f64,
            pick in 0..4usize,
        ) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let p = [ExtReal::Finite(0.5), ExtReal::Finite(1.0), ExtReal::Finite(2.0), ExtReal::Inf][pick];
            let spec = PenaltySpec::new(PenaltyKind::LpNormPower { p, r, lambda }, 3).unwrap();
            prop_assert!(spec.gbar(lo, Regime::A).unwrap() <= spec.gbar(hi, Regime::A).unwrap() * (1.0 + 1e-12));
            let ks = PenaltySpec::new(PenaltyKind::KSparseIndicator { k: 2 }, 3).unwrap();
            let regime = Regime::b(0.25).unwrap();
            prop_assert!(ks.gbar(lo, regime).unwrap() <= ks.gbar(hi, regime).unwrap());
        }

        #[test]
        fn gbar_scales_linearly_in_lambda(
            a in 0.1..10.0f64,
            lambda in 0.1..5.0f64,
            t in 0.0..10.0f64,
        ) {
            let base = PenaltySpec::new(PenaltyKind::LpNormPower {
                p: ExtReal::Finite(1.0), r: 2.0, lambda,
            }, 4).unwrap();
            let scaled = PenaltySpec::new(PenaltyKind::LpNormPower {
                p: ExtReal::Finite(1.0), r: 2.0, lambda: a * lambda,
            }, 4).unwrap();
            let lhs = scaled.gbar(t, Regime::A).unwrap();
            let rhs = a * base.gbar(t, Regime::A).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
        }

        #[test]
        fn norm_like_penalties_vanish_at_origin(d in 1..6usize, lambda in 0.1..5.0f64) {
            let zero = DVector::zeros(d);
            let power = PenaltySpec::new(PenaltyKind::LpNormPower {
                p: ExtReal::Finite(2.0), r: 1.0, lambda,
            }, d).unwrap();
            let ball = PenaltySpec::new(PenaltyKind::LpBallIndicator {
                p: ExtReal::Finite(1.0), lambda,
            }, d).unwrap();
            prop_assert_eq!(power.eval(&zero).unwrap(), 0.0);
            prop_assert_eq!(ball.eval(&zero).unwrap(), 0.0);
        }
    }
}
