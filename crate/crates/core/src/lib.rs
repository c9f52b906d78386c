//! Workbench for the sample complexity of dictionary learning and related
//! matrix factorizations (PCA, sparse coding, NMF, K-means, HOSVD).
//!
//! The crate computes the uniform-deviation bound
//!
//! ```text
//! sup_{D ∈ 𝔇} |F_X(D) − E f_x(D)| ≤ η_n = coef·c·√(β log n / n) + c·√((β+x)/n)
//! ```
//!
//! from its ingredients — penalty envelopes ḡ, Lipschitz constants, covering
//! constants (h, C), concentration parameters (c, T) — and verifies every
//! testable ingredient empirically against brute-force oracles and Monte
//! Carlo simulation at desk scale.
//!
//! Modules:
//! - [`penalty`]: coefficient penalties g and envelopes ḡ;
//! - [`dict`]: structured dictionary classes 𝔇 with covering constants and
//!   restricted-isometry computations;
//! - [`solver`]: inner coding problems f_x(D), the empirical cost F_X, and
//!   computable Lipschitz constants;
//! - [`distribution`]: training-data generators with concentration
//!   parameters;
//! - [`bounds`]: assembly of β, η_n, validity conditions, and the worked
//!   closed-form β formulas;
//! - [`verify`]: Monte Carlo harness probing the Lipschitz, concentration,
//!   tail, deviation and generalization claims.

pub mod bounds;
pub mod dict;
pub mod distribution;
pub mod error;
pub mod ext;
pub mod matio;
pub mod penalty;
pub mod rng;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use ext::ExtReal;
