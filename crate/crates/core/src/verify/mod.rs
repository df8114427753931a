//! Semigroup gradient inequalities and the quantitative pieces of the
//! Liouville argument, checked numerically on finite graphs.
//!
//! For `CD(0, ∞)` graphs the following hold for all `f` and `t > 0`:
//!
//! * (b) `Γ(P_t f) ≤ P_t Γ(f)`
//! * (c) `P_t(f²) − (P_t f)² ≤ 2t P_t Γ(f)`
//! * (d) `2t Γ(P_t f) ≤ P_t(f²) − (P_t f)²`
//!
//! A non-negative margin only ever means "no violation found"; curvature
//! itself is certified through [`crate::curvature::cd_check`].

mod cutoff;
mod decay;
mod harmonic;
mod inequality;

use thiserror::Error;

use crate::curvature::CurvatureError;
use crate::semigroup::SemigroupError;

pub use cutoff::{build_cutoffs, cutoff_approximation, ApproximationRow, CutoffSequence};
pub use decay::{gradient_decay, DecayCurve};
pub use harmonic::harmonic_solve;
pub use inequality::{
    check_condition, equivalence_experiment, gradient_gap_expansion_error, interpolation_check, Condition,
    ConditionMargins, EquivalenceOutcome, InequalityReport, MarginWitness, ViolationWitness,
};

/// Tolerance hierarchy shared by the verification suites.
pub mod tolerance {
    /// Algebraic identities between operators.
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Quantities passing through the eigendecomposition.
    pub const SPECTRAL: f64 = 1e-9;
    /// Margins of the semigroup inequalities.
    pub const MARGIN: f64 = 1e-7;
    /// Minimal curvature accepted as non-negative.
    pub const CURVATURE_ZERO: f64 = 1e-9;
    /// Relative slack on the gradient-decay bound.
    pub const DECAY_RELATIVE: f64 = 1e-6;
    /// Minimal size of a violation reported by the directed search.
    pub const VIOLATION_GAP: f64 = 1e-9;
}

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),

    #[error(transparent)]
    Curvature(#[from] CurvatureError),

    #[error("invalid time grid: {0}")]
    InvalidTimes(String),

    #[error("invalid finite-difference setup: {0}")]
    InvalidStep(String),

    #[error("invalid boundary: {0}")]
    InvalidBoundary(String),

    #[error("harmonic solve did not converge (residual {0:e})")]
    SolverFailure(f64),

    #[error("cutoff index must be at least 1")]
    InvalidCutoffIndex,

    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
}
