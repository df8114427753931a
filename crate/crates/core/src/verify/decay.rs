use serde::Serialize;

use super::{tolerance, VerifyError};
use crate::gamma::gamma;
use crate::graph::WeightedGraph;
use crate::semigroup::HeatOperator;

/// `t ↦ sup_x Γ(P_t f)(x)` together with the reverse-Poincaré bound
/// `2t sup_x Γ(P_t f) ≤ ‖f‖²_∞`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub sup_gamma: Vec<f64>,
    /// `2t · sup_gamma`
    pub scaled: Vec<f64>,
    /// `‖f‖²_∞`
    pub bound: f64,
    /// Whether every `scaled` value is within `bound · (1 + 1e−6)`.
    pub holds: bool,
}

impl DecayCurve {
    /// Two-column `t value` text for plotting.
    pub fn plot_data(&self, scaled: bool) -> String {
        let values = if scaled { &self.scaled } else { &self.sup_gamma };
        self.times.iter().zip(values).map(|(t, v)| format!("{t:.16e} {v:.16e}\n")).collect()
    }
}

/// Only meaningful as a bound on `CD(0, ∞)` graphs; elsewhere `holds` is
/// just reported.
pub fn gradient_decay(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    f: &[f64],
    times: &[f64],
) -> Result<DecayCurve, VerifyError> {
    if times.is_empty() || times.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(VerifyError::InvalidTimes("times must be positive".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(VerifyError::InvalidTimes("times must be increasing".into()));
    }
    let sup_f = f.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let bound = sup_f * sup_f;
    let mut sup_gamma = Vec::with_capacity(times.len());
    for &t in times {
        let ptf = heat.apply(t, f)?;
        let g = gamma(graph, &ptf, &ptf);
        sup_gamma.push(g.iter().copied().fold(0.0, f64::max));
    }
    let scaled: Vec<f64> = times.iter().zip(&sup_gamma).map(|(t, s)| 2.0 * t * s).collect();
    let holds = scaled.iter().all(|&v| v <= bound * (1.0 + tolerance::DECAY_RELATIVE));
    Ok(DecayCurve { times: times.to_vec(), sup_gamma, scaled, bound, holds })
}
