use rayon::prelude::*;
use serde::Serialize;

use super::output::{csv_table, json, num};
use super::{exit, CliError, Common, CutoffArgs, Format, LiouvilleArgs, Report, DEFAULT_TIMES};
use crate::curvature::{self, curvature_profile, Dimension};
use crate::graph::{self, check_assumption_a, generate, AssumptionReport, Family, WeightMode, WeightedGraph};
use crate::sampling::{seeded_rng, uniform_function};
use crate::semigroup::HeatOperator;
use crate::verify;

const DEFAULT_SAMPLES: usize = 100;

fn load_graph(c: &Common) -> Result<(WeightedGraph, String), CliError> {
    match (&c.graph, &c.gen) {
        (Some(path), None) => Ok((graph::load(path, c.mode)?, path.display().to_string())),
        (None, Some(spec)) => {
            let family: Family = spec.parse()?;
            let mode = c.mode.unwrap_or(WeightMode::Physical);
            if mode == WeightMode::Custom {
                return Err(CliError::BadInput("--mode custom needs a --graph file carrying the measure".into()));
            }
            Ok((generate(family, mode)?, family.to_string()))
        }
        _ => Err(CliError::BadInput("exactly one of --graph or --gen is required".into())),
    }
}

fn times(c: &Common) -> Result<Vec<f64>, CliError> {
    let times = c.times.clone().unwrap_or_else(|| DEFAULT_TIMES.to_vec());
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CliError::BadInput("--times must be positive".into()));
    }
    Ok(times)
}

fn tol(c: &Common) -> Result<f64, CliError> {
    if c.tol.is_finite() && c.tol >= 0.0 {
        Ok(c.tol)
    } else {
        Err(CliError::BadInput("--tol must be finite and non-negative".into()))
    }
}

struct Range {
    min: f64,
    max: f64,
}

fn range(values: impl Iterator<Item = f64>) -> Range {
    values.fold(Range { min: f64::INFINITY, max: f64::NEG_INFINITY }, |r, v| Range {
        min: r.min.min(v),
        max: r.max.max(v),
    })
}

pub(super) fn gen(c: &Common) -> Result<Report, CliError> {
    if c.gen.is_none() {
        return Err(CliError::BadInput("gen needs --gen SPEC".into()));
    }
    let (g, _) = load_graph(c)?;
    let body = match (c.format, &c.out) {
        (Format::Csv, _) => csv_table(
            &["u", "v", "mu"],
            g.edges().map(|(u, v, mu)| vec![g.label(u).into(), g.label(v).into(), num(mu)]),
        ),
        (Format::Json, Some(path)) if graph::is_tsv(path) => graph::to_tsv(&g),
        (Format::Json, _) => graph::to_json(&g),
    };
    Ok(Report::ok(body))
}

#[derive(Serialize)]
struct MinMax {
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct InfoReport {
    source: String,
    vertices: usize,
    edges: usize,
    mode: WeightMode,
    degree: MinMax,
    weighted_degree: MinMax,
    measure: MinMax,
    assumption: AssumptionReport,
}

pub(super) fn info(c: &Common) -> Result<Report, CliError> {
    let (g, source) = load_graph(c)?;
    let n = g.num_vertices();
    let mm = |r: Range| MinMax { min: r.min, max: r.max };
    let report = InfoReport {
        source,
        vertices: n,
        edges: g.num_edges(),
        mode: g.detect_mode(),
        degree: mm(range((0..n).map(|x| g.degree(x) as f64))),
        weighted_degree: mm(range((0..n).map(|x| g.weighted_degree(x)))),
        measure: mm(range(g.measures().iter().copied())),
        assumption: check_assumption_a(&g),
    };
    let body = match c.format {
        Format::Json => json(&report),
        Format::Csv => csv_table(
            &["key", "value"],
            [
                ("vertices", report.vertices.to_string()),
                ("edges", report.edges.to_string()),
                ("mode", report.mode.to_string()),
                ("degree_min", num(report.degree.min)),
                ("degree_max", num(report.degree.max)),
                ("weighted_degree_min", num(report.weighted_degree.min)),
                ("weighted_degree_max", num(report.weighted_degree.max)),
                ("measure_min", num(report.measure.min)),
                ("measure_max", num(report.measure.max)),
            ]
            .into_iter()
            .map(|(k, v)| vec![k.to_owned(), v]),
        ),
    };
    Ok(Report::ok(body))
}

#[derive(Serialize)]
struct CurvatureRow {
    vertex: usize,
    label: String,
    k_max: f64,
    witness_norm: f64,
}

#[derive(Serialize)]
struct Summary {
    min: f64,
    median: f64,
    max: f64,
    argmin: usize,
}

#[derive(Serialize)]
struct CurvatureReport {
    source: String,
    mode: WeightMode,
    dimension: Dimension,
    summary: Summary,
    vertices: Vec<CurvatureRow>,
}

pub(super) fn curvature(c: &Common) -> Result<Report, CliError> {
    let (g, source) = load_graph(c)?;
    let profile = curvature_profile(&g, c.dim)?;
    let rows: Vec<CurvatureRow> = profile
        .iter()
        .map(|r| CurvatureRow {
            vertex: r.vertex,
            label: g.label(r.vertex).to_owned(),
            k_max: r.k_max,
            witness_norm: r.witness.iter().map(|v| v * v).sum::<f64>().sqrt(),
        })
        .collect();
    let mut sorted: Vec<f64> = rows.iter().map(|r| r.k_max).collect();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 { sorted[mid] } else { 0.5 * (sorted[mid - 1] + sorted[mid]) };
    let argmin = rows.iter().min_by(|a, b| a.k_max.total_cmp(&b.k_max)).map(|r| r.vertex).unwrap_or(0);
    let report = CurvatureReport {
        source,
        mode: g.detect_mode(),
        dimension: c.dim,
        summary: Summary { min: sorted[0], median, max: sorted[sorted.len() - 1], argmin },
        vertices: rows,
    };
    let body = match c.format {
        Format::Json => json(&report),
        Format::Csv => csv_table(
            &["vertex", "label", "k_max", "witness_norm"],
            report
                .vertices
                .iter()
                .map(|r| vec![r.vertex.to_string(), r.label.clone(), num(r.k_max), num(r.witness_norm)]),
        ),
    };
    Ok(Report::ok(body))
}

#[derive(Serialize)]
struct CdRow {
    vertex: usize,
    label: String,
    holds: bool,
    min_eig: f64,
}

#[derive(Serialize)]
struct CdReport {
    source: String,
    #[serde(rename = "K")]
    k: f64,
    dimension: Dimension,
    tol: f64,
    holds: bool,
    worst_vertex: usize,
    worst_min_eig: f64,
    vertices: Vec<CdRow>,
}

#[derive(Serialize)]
struct CdFailure<'a> {
    vertex: usize,
    label: &'a str,
    min_eig: f64,
    witness: &'a [f64],
}

pub(super) fn cd_check(c: &Common) -> Result<Report, CliError> {
    let k = c.k.ok_or_else(|| CliError::BadInput("cd-check needs --K".into()))?;
    if !k.is_finite() {
        return Err(CliError::BadInput("--K must be finite".into()));
    }
    let tol = tol(c)?;
    let (g, source) = load_graph(c)?;
    let checks: Vec<_> =
        (0..g.num_vertices()).into_par_iter().map(|x| curvature::cd_check(&g, x, k, c.dim, tol)).collect();
    if let Some(bad) = checks.iter().find(|r| r.min_eig.is_nan()) {
        return Err(CliError::Numerical(format!("eigensolver failed at vertex {}", bad.vertex)));
    }
    let worst = checks.iter().min_by(|a, b| a.min_eig.total_cmp(&b.min_eig)).expect("graph has vertices");
    if !worst.holds {
        let failure = CdFailure {
            vertex: worst.vertex,
            label: g.label(worst.vertex),
            min_eig: worst.min_eig,
            witness: worst.witness.as_deref().unwrap_or(&[]),
        };
        return Ok(Report::failed(
            exit::CD_FAILS,
            format!(
                "CD({k}, {}) fails at vertex {} (minimal eigenvalue {:e})\n{}",
                c.dim,
                failure.label,
                failure.min_eig,
                json(&failure)
            ),
        ));
    }
    let report = CdReport {
        source,
        k,
        dimension: c.dim,
        tol,
        holds: true,
        worst_vertex: worst.vertex,
        worst_min_eig: worst.min_eig,
        vertices: checks
            .iter()
            .map(|r| CdRow {
                vertex: r.vertex,
                label: g.label(r.vertex).to_owned(),
                holds: r.holds,
                min_eig: r.min_eig,
            })
            .collect(),
    };
    let body = match c.format {
        Format::Json => json(&report),
        Format::Csv => csv_table(
            &["vertex", "label", "holds", "min_eig"],
            report
                .vertices
                .iter()
                .map(|r| vec![r.vertex.to_string(), r.label.clone(), r.holds.to_string(), num(r.min_eig)]),
        ),
    };
    Ok(Report::ok(body))
}

pub(super) fn semigroup_verify(c: &Common) -> Result<Report, CliError> {
    let times = times(c)?;
    let (g, _) = load_graph(c)?;
    let heat = HeatOperator::new(&g)?;
    let samples = c.samples.unwrap_or(DEFAULT_SAMPLES);
    let outcome = verify::equivalence_experiment(&g, &heat, samples, &times, c.seed)?;
    if !outcome.consistent {
        let detail = if outcome.curvature_nonnegative {
            let worst =
                outcome.reports.iter().min_by(|a, b| a.global_worst.total_cmp(&b.global_worst)).expect("three reports");
            format!(
                "curvature is non-negative (min {:e}) but condition {:?} has margin {:e}",
                outcome.curvature_min, worst.condition, worst.global_worst
            )
        } else {
            format!(
                "curvature is negative (min {:e} at vertex {}) but no gradient-bound violation was found",
                outcome.curvature_min,
                g.label(outcome.curvature_min_vertex)
            )
        };
        return Ok(Report::failed(exit::INCONSISTENT, format!("inconsistency: {detail}\n")));
    }
    let body = match c.format {
        Format::Json => json(&outcome),
        Format::Csv => csv_table(
            &["condition", "trial", "t", "worst_margin"],
            outcome.reports.iter().flat_map(|r| {
                let name = serde_json::to_value(r.condition)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default();
                r.worst_margin.iter().enumerate().flat_map(move |(trial, row)| {
                    let name = name.clone();
                    row.iter().zip(&r.times).map(move |(m, t)| vec![name.clone(), trial.to_string(), num(*t), num(*m)])
                })
            }),
        ),
    };
    Ok(Report::ok(body))
}

#[derive(Serialize)]
struct LiouvilleReport {
    source: String,
    seed: u64,
    constant: Option<f64>,
    curvature_min_eig: f64,
    curve: verify::DecayCurve,
}

pub(super) fn liouville_demo(a: &LiouvilleArgs) -> Result<Report, CliError> {
    let c = &a.common;
    let times = times(c)?;
    let tol = tol(c)?;
    let (g, source) = load_graph(c)?;
    let checks: Vec<_> = (0..g.num_vertices())
        .into_par_iter()
        .map(|x| curvature::cd_check(&g, x, 0.0, Dimension::Infinite, tol))
        .collect();
    let worst = checks.iter().min_by(|x, y| x.min_eig.total_cmp(&y.min_eig)).expect("graph has vertices");
    if !worst.holds {
        return Ok(Report::failed(
            exit::PRECONDITION,
            format!(
                "precondition failed: CD(0, inf) does not hold at vertex {} (minimal eigenvalue {:e})\n",
                g.label(worst.vertex),
                worst.min_eig
            ),
        ));
    }
    let heat = HeatOperator::new(&g)?;
    let f = match a.constant {
        Some(v) if v.is_finite() => vec![v; g.num_vertices()],
        Some(_) => return Err(CliError::BadInput("--constant must be finite".into())),
        None => uniform_function(g.num_vertices(), &mut seeded_rng(c.seed)),
    };
    let mut sorted = times.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let curve = verify::gradient_decay(&g, &heat, &f, &sorted)?;
    if !curve.holds {
        return Ok(Report::failed(
            exit::INCONSISTENT,
            format!("inconsistency: 2t·sup Γ(P_t f) exceeds ‖f‖²_∞ = {:e} on a CD(0, inf) graph\n", curve.bound),
        ));
    }
    let mut files = Vec::new();
    if let Some(prefix) = &a.plot_prefix {
        let with = |suffix: &str| {
            let mut name = prefix.clone().into_os_string();
            name.push(suffix);
            std::path::PathBuf::from(name)
        };
        files.push((with(".gamma.dat"), curve.plot_data(false)));
        files.push((with(".scaled.dat"), curve.plot_data(true)));
    }
    let body = match c.format {
        Format::Json => json(&LiouvilleReport {
            source,
            seed: c.seed,
            constant: a.constant,
            curvature_min_eig: worst.min_eig,
            curve,
        }),
        Format::Csv => csv_table(
            &["t", "sup_gamma", "scaled", "bound"],
            curve
                .times
                .iter()
                .zip(&curve.sup_gamma)
                .zip(&curve.scaled)
                .map(|((t, s), sc)| vec![num(*t), num(*s), num(*sc), num(curve.bound)]),
        ),
    };
    let mut report = Report::ok(body);
    report.files = files;
    Ok(report)
}

#[derive(Serialize)]
struct CutoffRow {
    k: usize,
    max_gamma: f64,
    gradient_bound: f64,
    half_inverse_square: f64,
    inverse_k: f64,
    saturated: bool,
}

#[derive(Serialize)]
struct CutoffReport {
    source: String,
    base: usize,
    label: String,
    radius: f64,
    intrinsic_bound: f64,
    saturation: usize,
    holds: bool,
    rows: Vec<CutoffRow>,
}

pub(super) fn cutoff_check(a: &CutoffArgs) -> Result<Report, CliError> {
    let c = &a.common;
    let (g, source) = load_graph(c)?;
    let base = match &a.base {
        None => 0,
        Some(name) => g
            .index_of(name)
            .or_else(|| name.parse().ok().filter(|&i: &usize| i < g.num_vertices()))
            .ok_or_else(|| CliError::BadInput(format!("base vertex `{name}` does not exist")))?,
    };
    let seq = verify::build_cutoffs(&g, base, a.k_max)?;
    let holds = seq.intrinsic() && seq.gradient_bounds_hold() && seq.saturates();
    if !holds {
        return Ok(Report::failed(
            exit::INCONSISTENT,
            format!(
                "inconsistency: cutoff bounds fail (intrinsic bound {:e}, saturation {})\n",
                seq.intrinsic_bound, seq.saturation
            ),
        ));
    }
    let rows: Vec<CutoffRow> = (1..=seq.k_max())
        .map(|k| {
            let kf = k as f64;
            CutoffRow {
                k,
                max_gamma: seq.max_gamma[k - 1],
                gradient_bound: seq.gradient_bound[k - 1],
                half_inverse_square: 1.0 / (2.0 * kf * kf),
                inverse_k: 1.0 / kf,
                saturated: seq.cutoffs[k - 1].iter().all(|&v| v == 1.0),
            }
        })
        .collect();
    let body = match c.format {
        Format::Json => json(&CutoffReport {
            source,
            base,
            label: g.label(base).to_owned(),
            radius: seq.distance.iter().copied().fold(0.0, f64::max),
            intrinsic_bound: seq.intrinsic_bound,
            saturation: seq.saturation,
            holds,
            rows,
        }),
        Format::Csv => csv_table(
            &["k", "max_gamma", "gradient_bound", "half_inverse_square", "inverse_k", "saturated"],
            rows.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    num(r.max_gamma),
                    num(r.gradient_bound),
                    num(r.half_inverse_square),
                    num(r.inverse_k),
                    r.saturated.to_string(),
                ]
            }),
        ),
    };
    Ok(Report::ok(body))
}
