use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::VerifyError;
use crate::gamma::gamma;
use crate::graph::WeightedGraph;
use crate::semigroup::HeatOperator;

/// Cutoffs `η_k = min(1, max(0, 2 − ρ/k))`, `k = 1..=k_max`, where `ρ` is
/// the distance from `base` in the metric with edge lengths
/// `σ(x,y) = min(Deg(x)^{-1/2}, Deg(y)^{-1/2})`, `Deg = Σμ/m`.
#[derive(Clone, Debug, Serialize)]
pub struct CutoffSequence {
    pub base: usize,
    pub distance: Vec<f64>,
    /// `max_x (1/m_x) Σ_y μ_xy σ(x,y)²`; at most 1 for an intrinsic metric.
    pub intrinsic_bound: f64,
    /// `cutoffs[k − 1] = η_k`
    pub cutoffs: Vec<Vec<f64>>,
    /// `sup_x Γ(η_k)(x)`
    pub max_gamma: Vec<f64>,
    /// `sup_x (1/2m_x) Σ_y μ_xy (σ(x,y)/k)²`
    pub gradient_bound: Vec<f64>,
    /// Smallest `k ≥ 1` with `η_k ≡ 1`.
    pub saturation: usize,
}

const SLACK: f64 = 1e-12;

impl CutoffSequence {
    pub fn k_max(&self) -> usize {
        self.cutoffs.len()
    }

    /// `Γ(η_k) ≤ gradient_bound_k ≤ 1/(2k²) ≤ 1/k` for every `k`.
    pub fn gradient_bounds_hold(&self) -> bool {
        (1..=self.k_max()).all(|k| {
            let kf = k as f64;
            let target = 1.0 / (2.0 * kf * kf);
            self.max_gamma[k - 1] <= self.gradient_bound[k - 1] * (1.0 + SLACK) + f64::MIN_POSITIVE
                && self.gradient_bound[k - 1] <= target * (1.0 + SLACK)
                && target <= 1.0 / kf
        })
    }

    /// `η_k ≡ 1` exactly for every `k ≥ saturation` in range, and not for
    /// the index before it.
    pub fn saturates(&self) -> bool {
        let ones = |k: usize| self.cutoffs[k - 1].iter().all(|&v| v == 1.0);
        (self.saturation..=self.k_max()).all(ones)
            && (self.saturation == 1 || self.saturation > self.k_max() || !ones(self.saturation - 1))
    }

    pub fn intrinsic(&self) -> bool {
        self.intrinsic_bound <= 1.0 + SLACK
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn edge_length(inv_sqrt_deg: &[f64], x: usize, y: usize) -> f64 {
    inv_sqrt_deg[x].min(inv_sqrt_deg[y])
}

pub fn build_cutoffs(graph: &WeightedGraph, base: usize, k_max: usize) -> Result<CutoffSequence, VerifyError> {
    let n = graph.num_vertices();
    if base >= n {
        return Err(VerifyError::UnknownVertex(base));
    }
    if k_max == 0 {
        return Err(VerifyError::InvalidCutoffIndex);
    }
    let inv_sqrt_deg: Vec<f64> = (0..n).map(|x| graph.weighted_degree(x).sqrt().recip()).collect();

    let intrinsic_bound = (0..n)
        .map(|x| {
            graph.neighbors(x).iter().map(|&(y, mu)| mu * edge_length(&inv_sqrt_deg, x, y).powi(2)).sum::<f64>()
                / graph.measure(x)
        })
        .fold(0.0, f64::max);

    let mut distance = vec![f64::INFINITY; n];
    distance[base] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, base)]);
    while let Some(Entry(d, x)) = heap.pop() {
        if d > distance[x] {
            continue;
        }
        for &(y, _) in graph.neighbors(x) {
            let candidate = d + edge_length(&inv_sqrt_deg, x, y);
            if candidate < distance[y] {
                distance[y] = candidate;
                heap.push(Entry(candidate, y));
            }
        }
    }
    let radius = distance.iter().copied().fold(0.0, f64::max);
    let saturation = (radius.ceil() as usize).max(1);

    let mut cutoffs = Vec::with_capacity(k_max);
    let mut max_gamma = Vec::with_capacity(k_max);
    let mut gradient_bound = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let kf = k as f64;
        let eta: Vec<f64> = distance.iter().map(|&r| (2.0 - r / kf).clamp(0.0, 1.0)).collect();
        max_gamma.push(gamma(graph, &eta, &eta).into_iter().fold(0.0, f64::max));
        gradient_bound.push(
            (0..n)
                .map(|x| {
                    graph
                        .neighbors(x)
                        .iter()
                        .map(|&(y, mu)| mu * (edge_length(&inv_sqrt_deg, x, y) / kf).powi(2))
                        .sum::<f64>()
                        / (2.0 * graph.measure(x))
                })
                .fold(0.0, f64::max),
        );
        cutoffs.push(eta);
    }

    Ok(CutoffSequence { base, distance, intrinsic_bound, cutoffs, max_gamma, gradient_bound, saturation })
}

/// How far `f_k = f η_k` is from `f` after the heat flow.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximationRow {
    pub k: usize,
    /// `sup |P_t f_k − P_t f|`
    pub value: f64,
    /// `sup |P_t f_k² − P_t f²|`
    pub square: f64,
    /// `sup |Γ(P_t f_k) − Γ(P_t f)|`
    pub gradient: f64,
}

pub fn cutoff_approximation(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    cutoffs: &CutoffSequence,
    f: &[f64],
    t: f64,
) -> Result<Vec<ApproximationRow>, VerifyError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(VerifyError::InvalidTimes(format!("t = {t} is not positive")));
    }
    let sup_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let squared = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();

    let ptf = heat.apply(t, f)?;
    let ptf2 = heat.apply(t, &squared(f))?;
    let grad = gamma(graph, &ptf, &ptf);
    cutoffs
        .cutoffs
        .iter()
        .enumerate()
        .map(|(i, eta)| {
            let fk: Vec<f64> = f.iter().zip(eta).map(|(a, e)| a * e).collect();
            let ptfk = heat.apply(t, &fk)?;
            let ptfk2 = heat.apply(t, &squared(&fk))?;
            Ok(ApproximationRow {
                k: i + 1,
                value: sup_diff(&ptfk, &ptf),
                square: sup_diff(&ptfk2, &ptf2),
                gradient: sup_diff(&gamma(graph, &ptfk, &ptfk), &grad),
            })
        })
        .collect()
}
