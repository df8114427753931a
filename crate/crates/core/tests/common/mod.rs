#![allow(dead_code)]

use gammacd::graph::{generate, Family, WeightMode, WeightedGraph};

/// Every generator family at sizes up to 50 vertices.
pub const SMALL_FAMILIES: &[&str] = &[
    "complete:2",
    "complete:5",
    "complete:8",
    "path:3",
    "path:6",
    "cycle:3",
    "cycle:4",
    "cycle:5",
    "cycle:8",
    "torus:2:5",
    "torus:2:6",
    "torus:3:3",
    "hypercube:2",
    "hypercube:3",
    "hypercube:4",
    "hypercube:5",
    "star:3",
    "star:5",
    "star:9",
    "tree:3:3",
    "tree:3:4",
    "tree:4:2",
];

pub fn build(spec: &str, mode: WeightMode) -> WeightedGraph {
    generate(spec.parse::<Family>().unwrap(), mode).unwrap()
}

/// `(name, graph)` over both weight modes.
pub fn corpus() -> Vec<(String, WeightedGraph)> {
    let mut out = Vec::new();
    for spec in SMALL_FAMILIES {
        for mode in [WeightMode::Physical, WeightMode::Normalized] {
            out.push((format!("{spec}/{mode}"), build(spec, mode)));
        }
    }
    out
}

/// A connected graph on `n ≥ 2` vertices: a random spanning tree plus up to
/// `extra` further edges, weights in `[0.2, 4]`. With `custom` the measure
/// is random in `[0.2, 4]`, otherwise normalized.
pub fn random_graph(seed: u64, n: usize, extra: usize, custom: bool) -> WeightedGraph {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        present.insert((u, v));
        edges.push((u, v, rng.random_range(0.2..=4.0)));
    }
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let (u, v) = (a.min(b), a.max(b));
        if u != v && present.insert((u, v)) {
            edges.push((u, v, rng.random_range(0.2..=4.0)));
        }
    }
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    if custom {
        let measure = (0..n).map(|_| rng.random_range(0.2..=4.0)).collect();
        WeightedGraph::new(labels, measure, edges).unwrap()
    } else {
        WeightedGraph::with_mode(labels, edges, WeightMode::Normalized).unwrap()
    }
}

pub fn random_function(seed: u64, n: usize) -> Vec<f64> {
    gammacd::sampling::uniform_function(n, &mut gammacd::sampling::seeded_rng(seed))
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
