//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p gammacd --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gammacd::curvature::{cd_check, curvature_at, curvature_oracle, Dimension};
use gammacd::graph::{WeightMode, WeightedGraph};
use gammacd::semigroup::semigroup_laws;
use gammacd::verify::{
    build_cutoffs, check_condition, equivalence_experiment, gradient_decay, interpolation_check, tolerance, Condition,
};
use gammacd::HeatOperator;
use rayon::prelude::*;

use common::{build, corpus, random_function};

const TIMES: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 5.0, 20.0];
const ORACLE_SAMPLES: usize = 10_000;
const DIMS: [Dimension; 2] = [Dimension::Finite(2.0), Dimension::Infinite];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

/// Per-vertex `(eigen, oracle)` curvature of one graph, for each of `DIMS`.
struct Curvatures {
    name: String,
    graph: WeightedGraph,
    values: [Vec<(f64, f64)>; 2],
}

impl Curvatures {
    fn compute(name: String, graph: WeightedGraph) -> Self {
        let values = DIMS.map(|d| {
            (0..graph.num_vertices())
                .into_par_iter()
                .map(|x| {
                    let k = curvature_at(&graph, x, d).unwrap().k_max;
                    (k, curvature_oracle(&graph, x, d, ORACLE_SAMPLES, x as u64))
                })
                .collect()
        });
        Curvatures { name, graph, values }
    }

    /// Oracle minimum over vertices at `n = ∞`.
    fn oracle_min(&self) -> f64 {
        self.values[1].iter().map(|v| v.1).fold(f64::INFINITY, f64::min)
    }

    fn eigen_min(&self) -> f64 {
        self.values[1].iter().map(|v| v.0).fold(f64::INFINITY, f64::min)
    }

    fn nonnegative(&self) -> bool {
        self.oracle_min() >= -tolerance::CURVATURE_ZERO && self.eigen_min() >= -tolerance::CURVATURE_ZERO
    }

    fn negative(&self) -> bool {
        self.oracle_min() < -tolerance::CURVATURE_ZERO
    }
}

fn criterion_1() -> Verdict {
    let k2 = build("complete:2", WeightMode::Physical);
    let mut worst = (curvature_at(&k2, 0, Dimension::Infinite).unwrap().k_max - 2.0).abs();
    for n in [1.0, 2.0, 5.0, 100.0] {
        for x in 0..2 {
            let k = curvature_at(&k2, x, Dimension::Finite(n)).unwrap().k_max;
            worst = worst.max((k - (2.0 - 2.0 / n)).abs());
        }
    }
    Verdict::new(worst <= 1e-9, format!("max error {worst:.2e}"))
}

fn criterion_2(cache: &[Curvatures]) -> Verdict {
    let mut worst_gap = 0.0f64;
    let mut worst_below = 0.0f64;
    let mut failures = Vec::new();
    let mut count = 0;
    for c in cache {
        for values in &c.values {
            for (x, &(k, oracle)) in values.iter().enumerate() {
                count += 1;
                let gap = (oracle - k).abs();
                worst_gap = worst_gap.max(gap);
                worst_below = worst_below.max(k - oracle);
                if gap > 1e-6 || oracle < k - 1e-8 {
                    failures.push(format!("{}@{x}", c.name));
                }
            }
        }
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "{count} vertex/dimension pairs, max |oracle - K| {worst_gap:.2e}, max K - oracle {worst_below:.2e}{}",
            listing(&failures)
        ),
    )
}

fn criterion_3(cache: &[Curvatures]) -> Verdict {
    let failures: Vec<String> = cache
        .par_iter()
        .flat_map_iter(|c| {
            DIMS.iter().zip(&c.values).flat_map(move |(&d, values)| {
                values.iter().enumerate().filter_map(move |(x, &(k, _))| {
                    let below = cd_check(&c.graph, x, k - 1e-6, d, 1e-10).holds;
                    let above = cd_check(&c.graph, x, k + 1e-6, d, 1e-10).holds;
                    (!below || above).then(|| format!("{}@{x}", c.name))
                })
            })
        })
        .collect();
    Verdict::new(failures.is_empty(), format!("K ± 1e-6 on every vertex{}", listing(&failures)))
}

fn criterion_4(flat: &[&Curvatures]) -> Verdict {
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    let mut slowest = Duration::ZERO;
    for c in flat {
        let start = Instant::now();
        let heat = HeatOperator::new(&c.graph).unwrap();
        let outcome = equivalence_experiment(&c.graph, &heat, 100, &TIMES, 4).unwrap();
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        let graph_worst = outcome.reports.iter().map(|r| r.global_worst).fold(f64::INFINITY, f64::min);
        worst = worst.min(graph_worst);
        if graph_worst < -tolerance::MARGIN || !outcome.consistent || elapsed > Duration::from_secs(60) {
            failures.push(c.name.clone());
        }
    }
    let expected = [
        "cycle:5",
        "cycle:8",
        "torus:2:5",
        "torus:2:6",
        "torus:2:16",
        "hypercube:2",
        "hypercube:3",
        "hypercube:4",
        "hypercube:5",
    ];
    let missing: Vec<String> = expected
        .iter()
        .flat_map(|spec| ["physical", "normalized"].map(|m| format!("{spec}/{m}")))
        .filter(|name| !flat.iter().any(|c| &c.name == name))
        .collect();
    if !missing.is_empty() {
        failures.push(format!("not confirmed flat: {}", missing.join(" ")));
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "{} graphs, worst margin {worst:.3e}, slowest graph {:.2}s{}",
            flat.len(),
            slowest.as_secs_f64(),
            listing(&failures)
        ),
    )
}

fn criterion_5(negative: &[&Curvatures]) -> Verdict {
    let mut failures = Vec::new();
    let mut smallest = f64::INFINITY;
    for c in negative {
        let heat = HeatOperator::new(&c.graph).unwrap();
        let outcome = equivalence_experiment(&c.graph, &heat, 1, &TIMES, 5).unwrap();
        match outcome.violation {
            Some(v) if v.gap >= tolerance::VIOLATION_GAP => {
                let m = check_condition(&c.graph, &heat, &v.f, v.t, Condition::BGradient).unwrap();
                smallest = smallest.min(-m.margin[v.vertex]);
                if -m.margin[v.vertex] < tolerance::VIOLATION_GAP {
                    failures.push(c.name.clone());
                }
            }
            _ => failures.push(c.name.clone()),
        }
    }
    let pass = failures.is_empty() && !negative.is_empty();
    Verdict::new(pass, format!("{} graphs, smallest gap {smallest:.3e}{}", negative.len(), listing(&failures)))
}

fn criterion_6() -> Verdict {
    let k2 = build("complete:2", WeightMode::Physical);
    let heat = HeatOperator::new(&k2).unwrap();
    let m = check_condition(&k2, &heat, &[0.0, 1.0], 0.25, Condition::DReversePoincare).unwrap();
    let e = (-1.0f64).exp();
    let lhs_err = (m.lhs[0] - 0.25 * e).abs();
    let rhs_err = (m.rhs[0] - 0.25 * (1.0 - e)).abs();
    Verdict::new(
        lhs_err <= 1e-9 && rhs_err <= 1e-9,
        format!("LHS {:.7} (err {lhs_err:.1e}), RHS {:.7} (err {rhs_err:.1e})", m.lhs[0], m.rhs[0]),
    )
}

fn criterion_7(graphs: &[&Curvatures]) -> Verdict {
    let certified: Vec<&Curvatures> = graphs
        .iter()
        .copied()
        .filter(|c| (0..c.graph.num_vertices()).all(|x| cd_check(&c.graph, x, 0.0, Dimension::Infinite, 1e-10).holds))
        .collect();
    let results: Vec<(String, f64)> = certified
        .par_iter()
        .map(|c| {
            let heat = HeatOperator::new(&c.graph).unwrap();
            let mut ratio = 0.0f64;
            let mut ok = true;
            for seed in 0..50 {
                let f = random_function(700 + seed, c.graph.num_vertices());
                let curve = gradient_decay(&c.graph, &heat, &f, &TIMES).unwrap();
                ok &= curve.scaled.iter().all(|&v| v <= curve.bound * (1.0 + 1e-6));
                ratio = ratio.max(curve.scaled.iter().fold(0.0, |m, v| m.max(v / curve.bound)));
            }
            (if ok { String::new() } else { c.name.clone() }, ratio)
        })
        .collect();
    let failures: Vec<String> = results.iter().filter(|r| !r.0.is_empty()).map(|r| r.0.clone()).collect();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Verdict::new(
        failures.is_empty() && !certified.is_empty(),
        format!("{} certified graphs, max 2t·supΓ/‖f‖² {worst:.6}{}", certified.len(), listing(&failures)),
    )
}

fn criterion_8() -> Verdict {
    let g = build("cycle:6", WeightMode::Physical);
    let heat = HeatOperator::new(&g).unwrap();
    let mut worst_dev = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for seed in 0..10 {
        let f = random_function(800 + seed, 6);
        for (t, s) in [(1.0, 0.5), (2.0, 0.3), (0.5, 0.25)] {
            let coarse = interpolation_check(&g, &heat, &f, t, s, 1e-3).unwrap();
            let fine = interpolation_check(&g, &heat, &f, t, s, 5e-4).unwrap();
            worst_dev = worst_dev.max(coarse);
            let ratio = coarse / fine;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Verdict::new(
        worst_dev <= 1e-5 && (lo - 4.0).abs() <= 0.5 && (hi - 4.0).abs() <= 0.5,
        format!("deviation at h=1e-3 ≤ {worst_dev:.2e}, halving ratio in [{lo:.3}, {hi:.3}]"),
    )
}

fn criterion_9(cache: &[Curvatures]) -> Verdict {
    let failures: Vec<String> = cache
        .par_iter()
        .flat_map_iter(|c| {
            let n = c.graph.num_vertices();
            (0..n).filter_map(move |base| {
                let seq = build_cutoffs(&c.graph, base, 20).unwrap();
                // The bound is attained on flat graphs; allow rounding only.
                let bounded = (1..=20).all(|k| {
                    let half = 1.0 / (2.0 * (k * k) as f64);
                    seq.max_gamma[k - 1] <= half * (1.0 + 1e-12) && half <= 1.0 / k as f64
                });
                let monotone = seq.cutoffs.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b));
                let saturated = seq.cutoffs[seq.saturation - 1..].iter().all(|e| e.iter().all(|&v| v == 1.0));
                (!(bounded && monotone && saturated && seq.saturation <= 20)).then(|| format!("{}@{base}", c.name))
            })
        })
        .collect();
    Verdict::new(failures.is_empty(), format!("every base vertex, k ≤ 20{}", listing(&failures)))
}

fn criterion_10(cache: &[Curvatures]) -> Verdict {
    let failures: Vec<String> = cache
        .par_iter()
        .filter_map(|c| {
            let heat = HeatOperator::new(&c.graph).unwrap();
            let ok = [(0.01, 0.1), (0.5, 1.0), (5.0, 20.0), (1.0, 1.0)].iter().all(|&(t, s)| {
                let r = semigroup_laws(&c.graph, &heat, t, s, 10, 1000).unwrap();
                r.holds(tolerance::SPECTRAL)
            });
            let kernel_complete = [0.01, 1.0, 100.0].iter().all(|&t| {
                let k = heat.kernel(t).unwrap();
                k.row_iter().all(|row| (row.sum() - 1.0).abs() <= 1e-10)
            });
            (!(ok && kernel_complete)).then(|| c.name.clone())
        })
        .collect();
    Verdict::new(failures.is_empty(), format!("{} graphs{}", cache.len(), listing(&failures)))
}

fn listing(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        let shown: Vec<&str> = failures.iter().take(8).map(String::as_str).collect();
        format!("; failing: {}{}", shown.join(", "), if failures.len() > 8 { ", ..." } else { "" })
    }
}

fn report(id: usize, title: &str, run: impl FnOnce() -> Verdict, failed: &mut usize) {
    let start = Instant::now();
    let v = run();
    let tag = if v.pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id:>2} {title}: {} ({:.2}s)", v.detail, start.elapsed().as_secs_f64());
    if !v.pass {
        *failed += 1;
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    report(1, "K2 curvature closed form", criterion_1, &mut failed);

    let start = Instant::now();
    let cache: Vec<Curvatures> = corpus().into_iter().map(|(name, g)| Curvatures::compute(name, g)).collect();
    let build_time = start.elapsed();
    report(
        2,
        "eigen curvature vs sampling oracle",
        || {
            let mut v = criterion_2(&cache);
            v.pass &= build_time < Duration::from_secs(120);
            v.detail.push_str(&format!(", oracle time {:.2}s", build_time.as_secs_f64()));
            v
        },
        &mut failed,
    );
    report(3, "CD threshold sharpness", || criterion_3(&cache), &mut failed);

    let large: Vec<Curvatures> = [WeightMode::Physical, WeightMode::Normalized]
        .into_iter()
        .map(|mode| Curvatures::compute(format!("torus:2:16/{mode}"), build("torus:2:16", mode)))
        .collect();
    let flat: Vec<&Curvatures> = cache.iter().chain(&large).filter(|c| c.nonnegative()).collect();
    let negative: Vec<&Curvatures> = cache.iter().filter(|c| c.negative()).collect();
    report(4, "forward inequalities on K_min ≥ 0 graphs", || criterion_4(&flat), &mut failed);
    report(5, "converse violation on K_min < 0 graphs", || criterion_5(&negative), &mut failed);
    report(6, "K2 reverse Poincaré closed form", criterion_6, &mut failed);
    report(
        7,
        "gradient decay on CD(0,∞) graphs",
        || criterion_7(&cache.iter().chain(&large).collect::<Vec<_>>()),
        &mut failed,
    );
    report(8, "interpolation derivative on cycle:6", criterion_8, &mut failed);
    report(9, "cutoff sequences", || criterion_9(&cache), &mut failed);
    report(10, "heat semigroup laws", || criterion_10(&cache), &mut failed);

    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
