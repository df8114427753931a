//! Bakry–Émery curvature: the `CD(K, n)` inequality
//! `Γ₂(f)(x) ≥ (1/n)(Δf)²(x) + K Γ(f)(x)` at a single vertex.
//!
//! All forms are taken on `B₂(x)` with the gauge `f(x) = 0`, which removes
//! the constant direction exactly. In that gauge `Γ(f)(x)` only sees the
//! sphere `S₁(x)` and is diagonal there, so the maximal `K` is the bottom
//! of a pencil whose null space (functions living on `S₂(x)`) is eliminated
//! by a Schur complement.

mod oracle;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gamma::{local_form, LocalForm};
use crate::graph::WeightedGraph;
use crate::linalg::sorted_symmetric_eigen;

pub use oracle::{curvature_oracle, curvature_oracle_with, OracleOptions};

/// Null-space positivity is accepted down to this (relative) level.
const NULL_SPACE_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum CurvatureError {
    #[error("vertex {0} has no neighbors; maximal curvature is undefined")]
    IsolatedVertex(usize),

    #[error(
        "internal inconsistency at vertex {vertex}: Γ₂ form has eigenvalue {min_eig} on functions vanishing on B₁"
    )]
    NullSpaceIndefinite { vertex: usize, min_eig: f64 },

    #[error("eigensolver did not converge at vertex {0}")]
    EigenFailure(usize),

    #[error("invalid dimension `{0}`: expected a positive real or `inf`")]
    InvalidDimension(String),
}

/// The dimension parameter `n ∈ (0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    pub fn finite(n: f64) -> Result<Self, CurvatureError> {
        if n.is_finite() && n > 0.0 {
            Ok(Dimension::Finite(n))
        } else if n == f64::INFINITY {
            Ok(Dimension::Infinite)
        } else {
            Err(CurvatureError::InvalidDimension(n.to_string()))
        }
    }

    /// `1/n`, exactly zero for `n = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Dimension::Finite(n) => 1.0 / n,
            Dimension::Infinite => 0.0,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Dimension::Finite(n) => n,
            Dimension::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(n) => write!(f, "{n}"),
            Dimension::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Dimension {
    type Err = CurvatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Dimension::Infinite),
            other => other
                .parse::<f64>()
                .ok()
                .and_then(|n| Dimension::finite(n).ok())
                .ok_or_else(|| CurvatureError::InvalidDimension(s.to_owned())),
        }
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Dimension::Finite(n) => serializer.serialize_f64(*n),
            Dimension::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureResult {
    pub vertex: usize,
    pub dimension: Dimension,
    pub k_max: f64,
    /// Minimizer supported on `B₂(vertex)`, zero at `vertex`, with
    /// `Γ(witness)(vertex) = 1`.
    pub witness: Vec<f64>,
    /// Eigenvalues of the reduced pencil, ascending; `k_max` is the first.
    pub spectrum: Vec<f64>,
}

/// Gauge-fixed forms at one vertex. Coordinates are `B₂(x) ∖ {x}` in ball
/// order, so the first `s1` entries are `S₁(x)`.
struct GaugedForms {
    local: LocalForm,
    s1: usize,
    /// `Γ₂ − (1/n) δ δᵀ`
    cd: DMatrix<f64>,
    /// `Γ` padded by zeros onto `S₂`.
    gamma: DMatrix<f64>,
}

impl GaugedForms {
    fn new(graph: &WeightedGraph, x: usize, n: Dimension) -> Self {
        let local = local_form(graph, x);
        let nb = local.b2_len();
        let n1 = local.b1_len();
        let dim = nb - 1;
        let mut cd = local.gamma2.view((1, 1), (dim, dim)).into_owned();
        let inv_n = n.reciprocal();
        if inv_n != 0.0 {
            let mut delta = DVector::zeros(dim);
            delta.rows_mut(0, n1 - 1).copy_from(&local.delta.rows(1, n1 - 1));
            cd -= &delta * delta.transpose() * inv_n;
        }
        let mut gamma = DMatrix::zeros(dim, dim);
        gamma.view_mut((0, 0), (n1 - 1, n1 - 1)).copy_from(&local.gamma.view((1, 1), (n1 - 1, n1 - 1)));
        GaugedForms { local, s1: n1 - 1, cd, gamma }
    }

    fn witness(&self, graph: &WeightedGraph, gauged: &DVector<f64>) -> Vec<f64> {
        let mut local = DVector::zeros(self.local.b2_len());
        local.rows_mut(1, gauged.len()).copy_from(gauged);
        self.local.extend(&local, graph.num_vertices())
    }
}

/// Maximal `K` such that `CD(K, n)` holds at `x`, with a minimizing witness.
pub fn curvature_at(graph: &WeightedGraph, x: usize, n: Dimension) -> Result<CurvatureResult, CurvatureError> {
    if graph.degree(x) == 0 {
        return Err(CurvatureError::IsolatedVertex(x));
    }
    let forms = GaugedForms::new(graph, x, n);
    let s1 = forms.s1;
    let s2 = forms.cd.nrows() - s1;
    let a11 = forms.cd.view((0, 0), (s1, s1)).into_owned();

    let (reduced, elimination) = if s2 == 0 {
        (a11, None)
    } else {
        let a12 = forms.cd.view((0, s1), (s1, s2)).into_owned();
        let a22 = forms.cd.view((s1, s1), (s2, s2)).into_owned();
        let (null_eigs, _) = sorted_symmetric_eigen(&a22).ok_or(CurvatureError::EigenFailure(x))?;
        let min_eig = null_eigs[0];
        let scale = null_eigs[s2 - 1].abs().max(1.0);
        if min_eig < -NULL_SPACE_TOL * scale {
            return Err(CurvatureError::NullSpaceIndefinite { vertex: x, min_eig });
        }
        let chol = a22.cholesky().ok_or(CurvatureError::NullSpaceIndefinite { vertex: x, min_eig })?;
        // A22⁻¹ A21
        let solved = chol.solve(&a12.transpose());
        (a11 - &a12 * &solved, Some(solved))
    };

    let d_inv_sqrt = DVector::from_iterator(s1, (0..s1).map(|i| 1.0 / forms.gamma[(i, i)].sqrt()));
    let scaled = DMatrix::from_fn(s1, s1, |i, j| d_inv_sqrt[i] * reduced[(i, j)] * d_inv_sqrt[j]);
    let (values, vectors) = sorted_symmetric_eigen(&scaled).ok_or(CurvatureError::EigenFailure(x))?;

    let u = vectors.column(0).component_mul(&d_inv_sqrt);
    let mut gauged = DVector::zeros(s1 + s2);
    gauged.rows_mut(0, s1).copy_from(&u);
    if let Some(solved) = elimination {
        gauged.rows_mut(s1, s2).copy_from(&(-(&solved * &u)));
    }

    Ok(CurvatureResult {
        vertex: x,
        dimension: n,
        k_max: values[0],
        witness: forms.witness(graph, &gauged),
        spectrum: values.iter().copied().collect(),
    })
}

/// [`curvature_at`] for every vertex, in vertex order.
pub fn curvature_profile(graph: &WeightedGraph, n: Dimension) -> Result<Vec<CurvatureResult>, CurvatureError> {
    (0..graph.num_vertices()).into_par_iter().map(|x| curvature_at(graph, x, n)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CdCheck {
    pub vertex: usize,
    pub holds: bool,
    /// Smallest eigenvalue of `Γ₂ − (1/n)δδᵀ − KΓ` on gauge-fixed `B₂(x)`.
    pub min_eig: f64,
    /// Violating direction (zero at the vertex) when the check fails.
    pub witness: Option<Vec<f64>>,
}

/// Tests `CD(K, n)` at `x`: the form `Γ₂ − (1/n)δδᵀ − KΓ` must be positive
/// semidefinite up to `tol` on functions on `B₂(x)`.
pub fn cd_check(graph: &WeightedGraph, x: usize, k: f64, n: Dimension, tol: f64) -> CdCheck {
    if graph.degree(x) == 0 {
        return CdCheck { vertex: x, holds: true, min_eig: f64::INFINITY, witness: None };
    }
    let forms = GaugedForms::new(graph, x, n);
    let form = &forms.cd - &forms.gamma * k;
    let Some((values, vectors)) = sorted_symmetric_eigen(&form) else {
        return CdCheck { vertex: x, holds: false, min_eig: f64::NAN, witness: None };
    };
    let min_eig = values[0];
    let holds = min_eig >= -tol.max(0.0);
    let witness = (!holds).then(|| forms.witness(graph, &vectors.column(0).into_owned()));
    CdCheck { vertex: x, holds, min_eig, witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{gamma2_at, gamma_at, laplacian_at};
    use crate::graph::{generate, Family, WeightMode};

    fn k2() -> WeightedGraph {
        generate(Family::Complete(2), WeightMode::Physical).unwrap()
    }

    #[test]
    fn parses_dimension() {
        assert_eq!("inf".parse::<Dimension>().unwrap(), Dimension::Infinite);
        assert_eq!("2.5".parse::<Dimension>().unwrap(), Dimension::Finite(2.5));
        assert!("0".parse::<Dimension>().is_err());
        assert!("-1".parse::<Dimension>().is_err());
        assert!("abc".parse::<Dimension>().is_err());
        assert_eq!(Dimension::finite(f64::INFINITY).unwrap(), Dimension::Infinite);
    }

    #[test]
    fn k2_closed_form() {
        let g = k2();
        let r = curvature_at(&g, 0, Dimension::Infinite).unwrap();
        assert!((r.k_max - 2.0).abs() < 1e-12);
        assert_eq!(r.witness[0], 0.0);
        assert!((gamma_at(&g, &r.witness, &r.witness, 0) - 1.0).abs() < 1e-12);
        let r2 = curvature_at(&g, 1, Dimension::Finite(2.0)).unwrap();
        assert!((r2.k_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k2_cd_check() {
        let g = k2();
        assert!(cd_check(&g, 0, 2.0, Dimension::Infinite, 1e-10).holds);
        let fail = cd_check(&g, 0, 2.01, Dimension::Infinite, 1e-10);
        assert!(!fail.holds);
        let w = fail.witness.unwrap();
        assert_eq!(w[0], 0.0);
        assert!(w[1].abs() > 0.0);
    }

    #[test]
    fn isolated_vertex_is_explicit() {
        let g = generate(Family::Path(1), WeightMode::Physical).unwrap();
        assert_eq!(curvature_at(&g, 0, Dimension::Infinite).unwrap_err(), CurvatureError::IsolatedVertex(0));
        assert!(cd_check(&g, 0, 1e9, Dimension::Infinite, 0.0).holds);
    }

    #[test]
    fn witness_attains_k_max() {
        let g = generate(Family::RegularTree { degree: 3, depth: 3 }, WeightMode::Physical).unwrap();
        for n in [Dimension::Finite(2.0), Dimension::Infinite] {
            for r in curvature_profile(&g, n).unwrap() {
                let w = &r.witness;
                let x = r.vertex;
                let lap = laplacian_at(&g, w, x);
                let lhs = gamma2_at(&g, w, x) - n.reciprocal() * lap * lap;
                let gam = gamma_at(&g, w, w, x);
                assert!((gam - 1.0).abs() < 1e-10);
                assert!((lhs - r.k_max * gam).abs() < 1e-8, "{lhs} vs {}", r.k_max);
            }
        }
    }
}
