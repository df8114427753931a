//! Laplacian, carré du champ `Γ`, iterated operator `Γ₂`, Dirichlet form
//! and `ℓᵖ(V, m)` norms.
//!
//! Functions on `V` are plain slices indexed by vertex. Global operators walk
//! the adjacency lists; the `*_at` variants evaluate a single vertex and only
//! read `f` on the ball they depend on (`B₁` for `Δ` and `Γ`, `B₂` for
//! `Γ₂`).
//!
//! `Γ` is always evaluated through its difference form
//! `Γ(f,g)(x) = (1/2m(x)) Σ_{y∼x} μ_xy (f(y)−f(x))(g(y)−g(x))`,
//! which avoids the cancellation in `½(Δ(fg) − fΔg − gΔf)`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{ball, Ball, WeightedGraph};

#[derive(Debug, Error, PartialEq)]
pub enum GammaError {
    #[error("ℓᵖ exponent must satisfy p ≥ 1 (got {0})")]
    InvalidExponent(f64),
}

fn check_len(graph: &WeightedGraph, f: &[f64]) {
    assert_eq!(f.len(), graph.num_vertices(), "function length does not match the vertex count");
}

pub fn laplacian_at(graph: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    let fx = f[x];
    let sum: f64 = graph.neighbors(x).iter().map(|&(y, mu)| mu * (f[y] - fx)).sum();
    sum / graph.measure(x)
}

/// `Δf(x) = (1/m(x)) Σ_{y∼x} μ_xy (f(y) − f(x))`.
pub fn laplacian(graph: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    check_len(graph, f);
    (0..graph.num_vertices()).map(|x| laplacian_at(graph, f, x)).collect()
}

pub fn gamma_at(graph: &WeightedGraph, f: &[f64], g: &[f64], x: usize) -> f64 {
    let (fx, gx) = (f[x], g[x]);
    let sum: f64 = graph.neighbors(x).iter().map(|&(y, mu)| mu * (f[y] - fx) * (g[y] - gx)).sum();
    sum / (2.0 * graph.measure(x))
}

/// `Γ(f, g)`; `gamma(graph, f, f)` is the squared gradient `Γ(f)`.
pub fn gamma(graph: &WeightedGraph, f: &[f64], g: &[f64]) -> Vec<f64> {
    check_len(graph, f);
    check_len(graph, g);
    (0..graph.num_vertices()).map(|x| gamma_at(graph, f, g, x)).collect()
}

/// `Γ₂(f)(x) = ½ΔΓ(f)(x) − Γ(f, Δf)(x)`, reading `f` only on `B₂(x)`.
pub fn gamma2_at(graph: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    let gamma_x = gamma_at(graph, f, f, x);
    let lap_x = laplacian_at(graph, f, x);
    let fx = f[x];
    let mut half_lap_gamma = 0.0;
    let mut cross = 0.0;
    for &(y, mu) in graph.neighbors(x) {
        half_lap_gamma += mu * (gamma_at(graph, f, f, y) - gamma_x);
        cross += mu * (f[y] - fx) * (laplacian_at(graph, f, y) - lap_x);
    }
    (half_lap_gamma - cross) / (2.0 * graph.measure(x))
}

pub fn gamma2(graph: &WeightedGraph, f: &[f64]) -> Vec<f64> {
    check_len(graph, f);
    let lap = laplacian(graph, f);
    let grad = gamma(graph, f, f);
    let lap_grad = laplacian(graph, &grad);
    let cross = gamma(graph, f, &lap);
    lap_grad.iter().zip(&cross).map(|(a, c)| 0.5 * a - c).collect()
}

/// `Q(f, g) = ½ Σ_{x∼y} μ_xy (f(y)−f(x))(g(y)−g(x))`, the sum running over
/// ordered neighbor pairs (each undirected edge counted once).
pub fn dirichlet_form(graph: &WeightedGraph, f: &[f64], g: &[f64]) -> f64 {
    check_len(graph, f);
    check_len(graph, g);
    graph.edges().map(|(u, v, mu)| mu * (f[v] - f[u]) * (g[v] - g[u])).sum()
}

/// `⟨f, g⟩ = Σ_x m(x) f(x) g(x)`.
pub fn inner_product(graph: &WeightedGraph, f: &[f64], g: &[f64]) -> f64 {
    check_len(graph, f);
    check_len(graph, g);
    graph.measures().iter().zip(f.iter().zip(g)).map(|(m, (a, b))| m * a * b).sum()
}

/// `‖f‖_{ℓᵖ(V,m)}`; pass `f64::INFINITY` for the sup norm.
pub fn norm_p(graph: &WeightedGraph, f: &[f64], p: f64) -> Result<f64, GammaError> {
    check_len(graph, f);
    if p.is_nan() || p < 1.0 {
        return Err(GammaError::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.iter().fold(0.0, |acc, v| acc.max(v.abs())));
    }
    let m = graph.measures();
    let sum: f64 = if p == 1.0 {
        m.iter().zip(f).map(|(m, v)| m * v.abs()).sum()
    } else if p == 2.0 {
        m.iter().zip(f).map(|(m, v)| m * v * v).sum()
    } else {
        m.iter().zip(f).map(|(m, v)| m * v.abs().powf(p)).sum()
    };
    Ok(if p == 1.0 { sum } else { sum.powf(1.0 / p) })
}

/// Quadratic and linear forms of `Γ`, `Γ₂` and `Δ` at one vertex.
///
/// Coordinates follow `support.members`: the center, then `S₁`, then `S₂`.
/// `gamma` and `delta` live on the `B₁` prefix, `gamma2` on all of `B₂`.
#[derive(Clone, Debug)]
pub struct LocalForm {
    pub center: usize,
    pub support: Ball,
    pub gamma: DMatrix<f64>,
    pub gamma2: DMatrix<f64>,
    pub delta: DVector<f64>,
}

impl LocalForm {
    pub fn b1_len(&self) -> usize {
        self.support.layer_ends[1]
    }

    pub fn b2_len(&self) -> usize {
        self.support.len()
    }

    /// Restriction of a global function to the `B₂` coordinates.
    pub fn restrict(&self, f: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.b2_len(), self.support.members.iter().map(|&v| f[v]))
    }

    /// Zero extension of a `B₂`-coordinate vector to all of `V`.
    pub fn extend(&self, local: &DVector<f64>, num_vertices: usize) -> Vec<f64> {
        let mut f = vec![0.0; num_vertices];
        for (&v, value) in self.support.members.iter().zip(local.iter()) {
            f[v] = *value;
        }
        f
    }

    pub fn gamma_value(&self, f: &[f64]) -> f64 {
        let local = self.restrict(f).rows(0, self.b1_len()).into_owned();
        local.dot(&(&self.gamma * &local))
    }

    pub fn gamma2_value(&self, f: &[f64]) -> f64 {
        let local = self.restrict(f);
        local.dot(&(&self.gamma2 * &local))
    }

    pub fn delta_value(&self, f: &[f64]) -> f64 {
        let local = self.restrict(f);
        self.delta.dot(&local.rows(0, self.b1_len()))
    }
}

/// Adds `scale · Γ-matrix of z` into `mat` (coordinates via `pos`).
fn add_gamma_form(
    graph: &WeightedGraph,
    z: usize,
    scale: f64,
    pos: &std::collections::HashMap<usize, usize>,
    mat: &mut DMatrix<f64>,
) {
    let c = scale / (2.0 * graph.measure(z));
    let iz = pos[&z];
    for &(w, mu) in graph.neighbors(z) {
        let iw = pos[&w];
        let v = c * mu;
        mat[(iw, iw)] += v;
        mat[(iz, iz)] += v;
        mat[(iw, iz)] -= v;
        mat[(iz, iw)] -= v;
    }
}

fn delta_form(
    graph: &WeightedGraph,
    z: usize,
    pos: &std::collections::HashMap<usize, usize>,
    len: usize,
) -> DVector<f64> {
    let mut row = DVector::zeros(len);
    let iz = pos[&z];
    for &(w, mu) in graph.neighbors(z) {
        let v = mu / graph.measure(z);
        row[pos[&w]] += v;
        row[iz] -= v;
    }
    row
}

/// Assembles the local forms at `x` by expanding the `Γ₂` definition over
/// `B₂(x)`.
pub fn local_form(graph: &WeightedGraph, x: usize) -> LocalForm {
    let support = ball(graph, x, 2);
    let pos = support.positions();
    let nb = support.len();
    let n1 = support.layer_ends[1];

    let mut gamma2 = DMatrix::zeros(nb, nb);
    let mut gamma = DMatrix::zeros(nb, nb);
    add_gamma_form(graph, x, 1.0, &pos, &mut gamma);
    let delta_x = delta_form(graph, x, &pos, nb);

    let c = 1.0 / (2.0 * graph.measure(x));
    for &(y, mu) in graph.neighbors(x) {
        // ½Δ Γ(f) part: c μ (Γ(f)(y) − Γ(f)(x))
        add_gamma_form(graph, y, c * mu, &pos, &mut gamma2);
        gamma2 -= &gamma * (c * mu);
        // −Γ(f, Δf) part: −c μ (f(y) − f(x)) (Δf(y) − Δf(x)), symmetrized
        let mut diff: DVector<f64> = DVector::zeros(nb);
        diff[pos[&y]] += 1.0;
        diff[0] -= 1.0;
        let ddiff = delta_form(graph, y, &pos, nb) - &delta_x;
        let outer: DMatrix<f64> = &diff * ddiff.transpose();
        gamma2 -= (&outer + outer.transpose()) * (0.5 * c * mu);
    }

    LocalForm {
        center: x,
        gamma: gamma.view((0, 0), (n1, n1)).into_owned(),
        gamma2,
        delta: delta_x.rows(0, n1).into_owned(),
        support,
    }
}
