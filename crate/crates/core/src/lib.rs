//! Discrete Γ-calculus on finite weighted graphs.
//!
//! * [`graph`]: weighted graphs `(V, E, m, μ)`, generators, balls, file I/O
//! * [`gamma`]: `Δ`, `Γ`, `Γ₂`, the Dirichlet form and `ℓᵖ(V, m)` norms
//! * [`curvature`]: `CD(K, n)` checks and maximal Bakry–Émery curvature
//! * [`semigroup`]: the heat semigroup `P_t = e^{tΔ}`
//! * [`verify`]: semigroup gradient inequalities, gradient decay, harmonic
//!   extension and cutoff sequences
//! * [`cli`]: the `gammacd` command-line front end

pub mod cli;
pub mod curvature;
pub mod gamma;
pub mod graph;
mod linalg;
pub mod sampling;
pub mod semigroup;
pub mod verify;

pub use curvature::{cd_check, curvature_at, curvature_oracle, curvature_profile, Dimension};
pub use graph::{ball, check_assumption_a, generate, Family, WeightMode, WeightedGraph};

pub use semigroup::{heat_operator, HeatOperator};
