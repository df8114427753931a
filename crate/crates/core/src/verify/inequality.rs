use rayon::prelude::*;
use serde::Serialize;

use super::{tolerance, VerifyError};
use crate::curvature::{curvature_profile, Dimension};
use crate::gamma::{gamma, gamma2};
use crate::graph::WeightedGraph;
use crate::sampling::{seeded_rng, uniform_function};
use crate::semigroup::HeatOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// (b) `Γ(P_t f) ≤ P_t Γ(f)`
    BGradient,
    /// (c) `P_t(f²) − (P_t f)² ≤ 2t P_t Γ(f)`
    CPoincare,
    /// (d) `2t Γ(P_t f) ≤ P_t(f²) − (P_t f)²`
    DReversePoincare,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::BGradient, Condition::CPoincare, Condition::DReversePoincare];
}

/// Both sides of one inequality, per vertex. `margin = rhs − lhs`.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionMargins {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub margin: Vec<f64>,
}

impl ConditionMargins {
    /// `(vertex, margin)` of the smallest margin.
    pub fn worst(&self) -> (usize, f64) {
        self.margin.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or((0, f64::INFINITY))
    }
}

fn check_positive_time(t: f64) -> Result<(), VerifyError> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(VerifyError::InvalidTimes(format!("t = {t} is not positive")))
    }
}

/// Evaluates both sides of `which` at time `t`, composing the operators
/// exactly as the inequality is written.
pub fn check_condition(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    f: &[f64],
    t: f64,
    which: Condition,
) -> Result<ConditionMargins, VerifyError> {
    check_positive_time(t)?;
    let ptf = heat.apply(t, f)?;
    let grad_ptf = gamma(graph, &ptf, &ptf);
    let variance = || -> Result<Vec<f64>, VerifyError> {
        let squared: Vec<f64> = f.iter().map(|v| v * v).collect();
        let pt_sq = heat.apply(t, &squared)?;
        Ok(pt_sq.iter().zip(&ptf).map(|(a, p)| a - p * p).collect())
    };
    let pt_grad = || -> Result<Vec<f64>, VerifyError> { Ok(heat.apply(t, &gamma(graph, f, f))?) };
    let (lhs, rhs) = match which {
        Condition::BGradient => (grad_ptf, pt_grad()?),
        Condition::CPoincare => (variance()?, pt_grad()?.iter().map(|v| 2.0 * t * v).collect()),
        Condition::DReversePoincare => (grad_ptf.iter().map(|v| 2.0 * t * v).collect(), variance()?),
    };
    let margin = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
    Ok(ConditionMargins { lhs, rhs, margin })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginWitness {
    pub trial: usize,
    pub t: f64,
    pub vertex: usize,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub condition: Condition,
    pub times: Vec<f64>,
    /// `worst_margin[trial][time]` = `min_x (rhs − lhs)`.
    pub worst_margin: Vec<Vec<f64>>,
    pub global_worst: f64,
    pub witness: Option<MarginWitness>,
}

impl InequalityReport {
    pub fn no_violation_found(&self, tol: f64) -> bool {
        self.global_worst >= -tol
    }
}

/// A condition-(b) violation located by the directed search.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationWitness {
    pub condition: Condition,
    pub t: f64,
    pub vertex: usize,
    /// `lhs − rhs > 0`.
    pub gap: f64,
    /// First-order prediction `−2t Γ₂(f)(vertex)` of the gap.
    pub predicted_gap: f64,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceOutcome {
    pub seed: u64,
    pub samples: usize,
    pub times: Vec<f64>,
    /// `min_x K_max(x, ∞)`.
    pub curvature_min: f64,
    pub curvature_min_vertex: usize,
    /// `curvature_min ≥ −1e−9`.
    pub curvature_nonnegative: bool,
    pub reports: Vec<InequalityReport>,
    pub violation: Option<ViolationWitness>,
    /// Non-negative curvature with no margin below `−1e−7`, or negative
    /// curvature with a violation found.
    pub consistent: bool,
}

fn validate_times(times: &[f64]) -> Result<(), VerifyError> {
    if times.is_empty() {
        return Err(VerifyError::InvalidTimes("empty time grid".into()));
    }
    times.iter().try_for_each(|&t| check_positive_time(t))
}

/// Runs the three inequalities on `samples` seeded random functions over
/// `times`, and when the curvature is negative somewhere, searches for a
/// condition-(b) violation along the curvature witness at small `t`.
pub fn equivalence_experiment(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    samples: usize,
    times: &[f64],
    seed: u64,
) -> Result<EquivalenceOutcome, VerifyError> {
    validate_times(times)?;
    let profile = curvature_profile(graph, Dimension::Infinite)?;
    let (min_vertex, curvature_min) =
        profile.iter().map(|r| (r.vertex, r.k_max)).min_by(|a, b| a.1.total_cmp(&b.1)).expect("graph has vertices");
    let curvature_nonnegative = curvature_min >= -tolerance::CURVATURE_ZERO;

    let mut rng = seeded_rng(seed);
    let functions: Vec<Vec<f64>> = (0..samples).map(|_| uniform_function(graph.num_vertices(), &mut rng)).collect();

    // per trial: per time: per condition: (vertex, margin)
    let per_trial: Vec<Vec<[(usize, f64); 3]>> = functions
        .par_iter()
        .map(|f| {
            times
                .iter()
                .map(|&t| {
                    let mut row = [(0, 0.0); 3];
                    for (slot, which) in row.iter_mut().zip(Condition::ALL) {
                        *slot = check_condition(graph, heat, f, t, which)?.worst();
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>, VerifyError>>()
        })
        .collect::<Result<_, _>>()?;

    let reports = Condition::ALL
        .iter()
        .enumerate()
        .map(|(c, &condition)| {
            let worst_margin: Vec<Vec<f64>> =
                per_trial.iter().map(|trial| trial.iter().map(|row| row[c].1).collect()).collect();
            let mut global_worst = f64::INFINITY;
            let mut witness = None;
            for (trial, rows) in per_trial.iter().enumerate() {
                for (ti, row) in rows.iter().enumerate() {
                    let (vertex, margin) = row[c];
                    if margin < global_worst {
                        global_worst = margin;
                        witness = Some((trial, times[ti], vertex));
                    }
                }
            }
            InequalityReport {
                condition,
                times: times.to_vec(),
                worst_margin,
                global_worst,
                witness: witness.map(|(trial, t, vertex)| MarginWitness {
                    trial,
                    t,
                    vertex,
                    f: functions[trial].clone(),
                }),
            }
        })
        .collect::<Vec<_>>();

    let violation = if curvature_nonnegative {
        None
    } else {
        directed_violation_search(graph, heat, &profile[min_vertex].witness, min_vertex)?
    };
    let consistent = if curvature_nonnegative {
        reports.iter().all(|r| r.no_violation_found(tolerance::MARGIN))
    } else {
        violation.is_some()
    };

    Ok(EquivalenceOutcome {
        seed,
        samples,
        times: times.to_vec(),
        curvature_min,
        curvature_min_vertex: min_vertex,
        curvature_nonnegative,
        reports,
        violation,
        consistent,
    })
}

/// The (b)-gap `P_t Γ(f) − Γ(P_t f)` at `x` behaves like `2t Γ₂(f)(x)` as
/// `t → 0`, so a witness with `Γ₂(f)(x) < 0` must violate (b) for small `t`.
/// Scans `t = 1e−4 · 2^k` and keeps the largest gap.
fn directed_violation_search(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    f: &[f64],
    vertex: usize,
) -> Result<Option<ViolationWitness>, VerifyError> {
    let gamma2_x = gamma2(graph, f)[vertex];
    let mut best: Option<ViolationWitness> = None;
    for k in 0..24 {
        let t = 1e-4 * 2f64.powi(k);
        let margins = check_condition(graph, heat, f, t, Condition::BGradient)?;
        let gap = -margins.margin[vertex];
        if gap >= tolerance::VIOLATION_GAP && best.as_ref().is_none_or(|b| gap > b.gap) {
            best = Some(ViolationWitness {
                condition: Condition::BGradient,
                t,
                vertex,
                gap,
                predicted_gap: -2.0 * t * gamma2_x,
                f: f.to_vec(),
            });
        }
    }
    Ok(best)
}

/// `max_x |(P_t Γ(f) − Γ(P_t f))(x) − 2t Γ₂(f)(x)|`, which is `O(t²)`.
pub fn gradient_gap_expansion_error(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    f: &[f64],
    t: f64,
) -> Result<f64, VerifyError> {
    let margins = check_condition(graph, heat, f, t, Condition::BGradient)?;
    let g2 = gamma2(graph, f);
    Ok(margins.margin.iter().zip(&g2).fold(0.0, |acc, (m, g)| acc.max((m - 2.0 * t * g).abs())))
}

/// Compares the central difference of `φ(s) = P_s (P_{t−s} f)²` with
/// `dφ/ds = 2 P_s Γ(P_{t−s} f)`; returns the max absolute deviation.
pub fn interpolation_check(
    graph: &WeightedGraph,
    heat: &HeatOperator,
    f: &[f64],
    t: f64,
    s: f64,
    h: f64,
) -> Result<f64, VerifyError> {
    if !(s > 0.0 && s < t) {
        return Err(VerifyError::InvalidStep(format!("need 0 < s < t (s = {s}, t = {t})")));
    }
    if !(h > 0.0 && h < s.min(t - s)) {
        return Err(VerifyError::InvalidStep(format!("need 0 < h < min(s, t − s) (h = {h})")));
    }
    let phi = |s: f64| -> Result<Vec<f64>, VerifyError> {
        let inner = heat.apply(t - s, f)?;
        let squared: Vec<f64> = inner.iter().map(|v| v * v).collect();
        Ok(heat.apply(s, &squared)?)
    };
    let ahead = phi(s + h)?;
    let behind = phi(s - h)?;
    let inner = heat.apply(t - s, f)?;
    let exact = heat.apply(s, &gamma(graph, &inner, &inner))?;
    Ok(ahead
        .iter()
        .zip(&behind)
        .zip(&exact)
        .fold(0.0, |acc, ((a, b), e)| acc.max(((a - b) / (2.0 * h) - 2.0 * e).abs())))
}
