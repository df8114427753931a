//! The heat semigroup `P_t = e^{tΔ}` on a finite weighted graph.
//!
//! `Δ` is self-adjoint on `ℓ²(V, m)`, so `S = M^{1/2} Δ M^{-1/2}` is a
//! symmetric matrix (`S_xy = μ_xy/√(m(x)m(y))`, `S_xx = −Deg(x)`). One dense
//! eigendecomposition `S = U Λ Uᵀ` serves every `t`:
//! `P_t f = M^{-1/2} U e^{tΛ} Uᵀ M^{1/2} f`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gamma::{dirichlet_form, inner_product, laplacian, norm_p};
use crate::graph::WeightedGraph;
use crate::linalg::sorted_symmetric_eigen;
use crate::sampling::{seeded_rng, uniform_function};

/// Absolute tolerance on the generator spectrum, scaled by `max(1, ‖S‖)`.
pub const SPECTRAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum SemigroupError {
    #[error("eigensolver did not converge on the {0}×{0} generator")]
    EigenFailure(usize),

    #[error("generator has positive eigenvalue {0}")]
    PositiveEigenvalue(f64),

    #[error("generator kernel has dimension {0}, expected 1 for a connected graph")]
    KernelDimension(usize),

    #[error("time must be finite and non-negative (got {0})")]
    NegativeTime(f64),
}

#[derive(Clone, Debug)]
pub struct HeatOperator {
    sqrt_m: DVector<f64>,
    /// Ascending, so the last one is the zero eigenvalue.
    eigenvalues: DVector<f64>,
    /// Columns are the orthonormal eigenvectors of `S`.
    eigenvectors: DMatrix<f64>,
}

impl HeatOperator {
    pub fn new(graph: &WeightedGraph) -> Result<Self, SemigroupError> {
        let n = graph.num_vertices();
        let sqrt_m = DVector::from_iterator(n, graph.measures().iter().map(|m| m.sqrt()));
        let mut sym = DMatrix::zeros(n, n);
        for x in 0..n {
            sym[(x, x)] = -graph.weighted_degree(x);
            for &(y, mu) in graph.neighbors(x) {
                sym[(x, y)] = mu / (sqrt_m[x] * sqrt_m[y]);
            }
        }
        let scale = sym.amax().max(1.0);
        let (eigenvalues, eigenvectors) = sorted_symmetric_eigen(&sym).ok_or(SemigroupError::EigenFailure(n))?;
        let tol = SPECTRAL_TOL * scale;
        let top = eigenvalues[n - 1];
        if top > tol {
            return Err(SemigroupError::PositiveEigenvalue(top));
        }
        let kernel = eigenvalues.iter().filter(|l| l.abs() <= tol).count();
        if kernel != 1 {
            return Err(SemigroupError::KernelDimension(kernel));
        }
        Ok(HeatOperator { sqrt_m, eigenvalues, eigenvectors })
    }

    pub fn num_vertices(&self) -> usize {
        self.sqrt_m.len()
    }

    /// Spectrum of the generator, ascending (all `≤ 0`).
    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    fn check_time(t: f64) -> Result<(), SemigroupError> {
        if t.is_finite() && t >= 0.0 {
            Ok(())
        } else {
            Err(SemigroupError::NegativeTime(t))
        }
    }

    /// `P_t f`. Constants are returned unchanged.
    pub fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>, SemigroupError> {
        Self::check_time(t)?;
        assert_eq!(f.len(), self.num_vertices(), "function length does not match the vertex count");
        if t == 0.0 || f.iter().all(|&v| v == f[0]) {
            return Ok(f.to_vec());
        }
        let lifted = DVector::from_iterator(f.len(), f.iter().zip(self.sqrt_m.iter()).map(|(v, s)| v * s));
        let mut coeffs = self.eigenvectors.tr_mul(&lifted);
        for (c, l) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= (t * l).exp();
        }
        let evolved = &self.eigenvectors * coeffs;
        Ok(evolved.iter().zip(self.sqrt_m.iter()).map(|(v, s)| v / s).collect())
    }

    /// The matrix of `P_t`: `(P_t f)(x) = Σ_y kernel[(x, y)] f(y)`.
    pub fn kernel(&self, t: f64) -> Result<DMatrix<f64>, SemigroupError> {
        Self::check_time(t)?;
        let n = self.num_vertices();
        let mut scaled = self.eigenvectors.clone();
        for (j, l) in self.eigenvalues.iter().enumerate() {
            let e = (t * l).exp();
            scaled.column_mut(j).scale_mut(e);
        }
        let mut k = scaled * self.eigenvectors.transpose();
        for x in 0..n {
            for y in 0..n {
                k[(x, y)] *= self.sqrt_m[y] / self.sqrt_m[x];
            }
        }
        Ok(k)
    }
}

pub fn heat_operator(graph: &WeightedGraph) -> Result<HeatOperator, SemigroupError> {
    HeatOperator::new(graph)
}

/// Worst observed deviations from the semigroup laws. Deviations are
/// relative to the size of the inputs; contraction and energy entries are
/// the amount by which the smaller side was exceeded (0 when the law held).
#[derive(Clone, Debug, Default, Serialize)]
pub struct SemigroupLawReport {
    pub t: f64,
    pub s: f64,
    pub trials: usize,
    pub seed: u64,
    /// `P_{t+s} f` vs `P_t P_s f`
    pub composition: f64,
    /// `⟨P_t f, g⟩_m` vs `⟨f, P_t g⟩_m`
    pub self_adjointness: f64,
    /// `Δ P_t f` vs `P_t Δ f`
    pub commutation: f64,
    pub contraction_l1: f64,
    pub contraction_l2: f64,
    pub contraction_linf: f64,
    /// `‖P_t 𝟙 − 𝟙‖_∞`
    pub stochastic_completeness: f64,
    /// `Q(P_t f) − Q(f)`, relative
    pub energy_excess: f64,
    /// Smallest value of `P_t f` over the non-negative trials.
    pub positivity_min: f64,
    /// Smallest entry of the kernel matrix of `P_t`.
    pub kernel_min: f64,
}

impl SemigroupLawReport {
    /// Spectral laws at `tol`, positivity and stochastic completeness at
    /// their fixed `-1e-10` / `1e-10` levels.
    pub fn holds(&self, tol: f64) -> bool {
        let spectral = [
            self.composition,
            self.self_adjointness,
            self.commutation,
            self.contraction_l1,
            self.contraction_l2,
            self.contraction_linf,
            self.energy_excess,
        ];
        spectral.iter().all(|&d| d <= tol)
            && self.stochastic_completeness <= 1e-10
            && self.positivity_min >= -1e-10
            && self.kernel_min >= -1e-10
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Checks composition, self-adjointness, commutation with `Δ`, `ℓᵖ`
/// contraction, positivity, stochastic completeness and energy decay on
/// `trials` seeded random functions.
pub fn semigroup_laws(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    t: f64,
    s: f64,
    trials: usize,
    seed: u64,
) -> Result<SemigroupLawReport, SemigroupError> {
    let n = graph.num_vertices();
    let mut rng = seeded_rng(seed);
    let mut report = SemigroupLawReport { t, s, trials, seed, positivity_min: f64::INFINITY, ..Default::default() };
    let max_deg = (0..n).map(|x| graph.weighted_degree(x)).fold(1.0, f64::max);
    let excess = |after: f64, before: f64| ((after - before) / before.max(1e-300)).max(0.0);

    for _ in 0..trials {
        let f = uniform_function(n, &mut rng);
        let g = uniform_function(n, &mut rng);
        let scale = sup(&f).max(1e-300);

        let ptf = heat.apply(t, &f)?;
        let composed = heat.apply(t, &heat.apply(s, &f)?)?;
        let direct = heat.apply(t + s, &f)?;
        report.composition = report.composition.max(sup_diff(&composed, &direct) / scale);

        let ptg = heat.apply(t, &g)?;
        let lhs = inner_product(graph, &ptf, &g);
        let rhs = inner_product(graph, &f, &ptg);
        let norms = norm_p(graph, &f, 2.0).unwrap() * norm_p(graph, &g, 2.0).unwrap();
        report.self_adjointness = report.self_adjointness.max((lhs - rhs).abs() / norms.max(1e-300));

        let lap_then = heat.apply(t, &laplacian(graph, &f))?;
        let then_lap = laplacian(graph, &ptf);
        report.commutation = report.commutation.max(sup_diff(&lap_then, &then_lap) / (max_deg * scale));

        for (p, slot) in [
            (1.0, &mut report.contraction_l1),
            (2.0, &mut report.contraction_l2),
            (f64::INFINITY, &mut report.contraction_linf),
        ] {
            let before = norm_p(graph, &f, p).unwrap();
            let after = norm_p(graph, &ptf, p).unwrap();
            *slot = slot.max(excess(after, before));
        }

        let energy_before = dirichlet_form(graph, &f, &f);
        let energy_after = dirichlet_form(graph, &ptf, &ptf);
        report.energy_excess = report.energy_excess.max(excess(energy_after, energy_before));

        let positive: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let evolved = heat.apply(t, &positive)?;
        report.positivity_min = evolved.iter().copied().fold(report.positivity_min, f64::min);
    }

    // From the kernel rows, since `apply` returns constants unchanged.
    let kernel = heat.kernel(t)?;
    report.stochastic_completeness = kernel.row_iter().fold(0.0, |acc, row| acc.max((row.sum() - 1.0).abs()));
    report.kernel_min = kernel.min();
    if trials == 0 {
        report.positivity_min = report.kernel_min;
    }
    Ok(report)
}
