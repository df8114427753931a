//! Weighted graphs `(V, E, m, μ)`.
//!
//! Vertices are dense indices `0..N` with an external string label per
//! vertex. Every graph held by a [`WeightedGraph`] is finite, connected,
//! free of self-loops and duplicate edges, with strictly positive vertex
//! measures and edge weights. These invariants are enforced by the single
//! constructor [`WeightedGraph::new`], so downstream modules never re-check
//! them.

mod generate;
mod io;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{generate, Family};
pub(crate) use io::is_tsv;
pub use io::{load, load_json, load_tsv, parse_json, parse_tsv, save, save_json, save_tsv, to_json, to_tsv};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph file: {0}")]
    Malformed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("graph has no vertices")]
    Empty,

    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),

    #[error("edge references unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(String, String),

    #[error("edge {{{u}, {v}}} has non-positive weight {mu}")]
    NonPositiveWeight { u: String, v: String, mu: f64 },

    #[error("vertex `{vertex}` has non-positive measure {m}")]
    NonPositiveMeasure { vertex: String, m: f64 },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("weight mode `{0}` cannot be applied here")]
    InvalidMode(WeightMode),
}

/// How the vertex measure `m` relates to the edge weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// `m(x) = Σ_{y∼x} μ_xy`
    Normalized,
    /// `m ≡ 1`
    Physical,
    /// Measures supplied explicitly.
    Custom,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Normalized => "normalized",
            WeightMode::Physical => "physical",
            WeightMode::Custom => "custom",
        })
    }
}

impl FromStr for WeightMode {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "normalized" | "normalised" => Ok(WeightMode::Normalized),
            "physical" | "combinatorial" => Ok(WeightMode::Physical),
            "custom" => Ok(WeightMode::Custom),
            other => Err(GraphError::Malformed(format!("unknown weight mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    measure: Vec<f64>,
    /// Neighbor lists sorted by neighbor index; each edge stored in both directions.
    adjacency: Vec<Vec<(usize, f64)>>,
    num_edges: usize,
}

impl WeightedGraph {
    /// Builds a graph from labels, per-vertex measures and undirected edges
    /// `(u, v, μ_uv)` given by index. Each undirected edge must appear once.
    pub fn new(
        labels: Vec<String>,
        measure: Vec<f64>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        if labels.is_empty() {
            return Err(GraphError::Empty);
        }
        if labels.len() != measure.len() {
            return Err(GraphError::Malformed(format!("{} labels but {} measures", labels.len(), measure.len())));
        }
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(label.clone()));
            }
        }
        for (label, &m) in labels.iter().zip(&measure) {
            if !(m.is_finite() && m > 0.0) {
                return Err(GraphError::NonPositiveMeasure { vertex: label.clone(), m });
            }
        }

        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut num_edges = 0;
        for (u, v, mu) in edges {
            if u >= n || v >= n {
                return Err(GraphError::UnknownVertex(format!("#{}", u.max(v))));
            }
            if u == v {
                return Err(GraphError::SelfLoop(labels[u].clone()));
            }
            if !(mu.is_finite() && mu > 0.0) {
                return Err(GraphError::NonPositiveWeight { u: labels[u].clone(), v: labels[v].clone(), mu });
            }
            adjacency[u].push((v, mu));
            adjacency[v].push((u, mu));
            num_edges += 1;
        }
        for (x, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_by_key(|&(y, _)| y);
            if let Some(w) = nbrs.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(GraphError::DuplicateEdge(labels[x].clone(), labels[w[0].0].clone()));
            }
        }

        let graph = WeightedGraph { labels, index, measure, adjacency, num_edges };
        let components = graph.count_components();
        if components > 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(graph)
    }

    /// Builds a graph whose measure is dictated by `mode`
    /// (`Custom` is rejected: there is nothing to derive the measure from).
    pub fn with_mode(
        labels: Vec<String>,
        edges: Vec<(usize, usize, f64)>,
        mode: WeightMode,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let measure = match mode {
            WeightMode::Physical => vec![1.0; n],
            WeightMode::Normalized => {
                let mut m = vec![0.0; n];
                for &(u, v, mu) in &edges {
                    if u < n && v < n {
                        m[u] += mu;
                        m[v] += mu;
                    }
                }
                m
            }
            WeightMode::Custom => return Err(GraphError::InvalidMode(mode)),
        };
        WeightedGraph::new(labels, measure, edges)
    }

    /// Same edges, measure replaced according to `mode`.
    pub fn remeasured(&self, mode: WeightMode) -> Result<Self, GraphError> {
        WeightedGraph::with_mode(self.labels.clone(), self.edges().collect(), mode)
    }

    /// Same combinatorics, with every `μ` multiplied by `mu_scale` and every
    /// `m` by `m_scale`.
    pub fn rescaled(&self, mu_scale: f64, m_scale: f64) -> Result<Self, GraphError> {
        WeightedGraph::new(
            self.labels.clone(),
            self.measure.iter().map(|m| m * m_scale).collect(),
            self.edges().map(|(u, v, mu)| (u, v, mu * mu_scale)),
        )
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// `(y, μ_xy)` for every `y ∼ x`, sorted by `y`.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    /// Each undirected edge once, as `(u, v, μ_uv)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&(v, _)| v > u).map(move |&(v, mu)| (u, v, mu)))
    }

    /// `Deg(x) = (1/m(x)) Σ_{y∼x} μ_xy`.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        let total: f64 = self.adjacency[x].iter().map(|&(_, mu)| mu).sum();
        total / self.measure[x]
    }

    /// The weight mode the measure happens to satisfy.
    pub fn detect_mode(&self) -> WeightMode {
        if self.measure.iter().all(|&m| m == 1.0) {
            return WeightMode::Physical;
        }
        let normalized = (0..self.num_vertices()).all(|x| {
            let total: f64 = self.adjacency[x].iter().map(|&(_, mu)| mu).sum();
            (total - self.measure[x]).abs() <= 1e-12 * total.max(1.0)
        });
        if normalized {
            WeightMode::Normalized
        } else {
            WeightMode::Custom
        }
    }

    /// Combinatorial distances from `source` (`usize::MAX` when unreachable).
    pub fn hop_distances(&self, source: usize, limit: Option<usize>) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            if limit.is_some_and(|r| dist[x] >= r) {
                continue;
            }
            for &(y, _) in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    fn count_components(&self) -> usize {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        components
    }
}

/// Combinatorial ball around a vertex.
///
/// Members are ordered center first, then the sphere at distance 1, then the
/// sphere at distance 2 and so on, each sphere sorted by vertex index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub center: usize,
    pub radius: usize,
    pub members: Vec<usize>,
    /// `layer_ends[k]` is the number of members at distance `≤ k`.
    pub layer_ends: Vec<usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members at distance `≤ k` (a prefix of `members`).
    pub fn within(&self, k: usize) -> &[usize] {
        &self.members[..self.layer_ends[k.min(self.radius)]]
    }

    /// Members at distance exactly `k`.
    pub fn sphere(&self, k: usize) -> &[usize] {
        if k > self.radius {
            return &[];
        }
        let start = if k == 0 { 0 } else { self.layer_ends[k - 1] };
        &self.members[start..self.layer_ends[k]]
    }

    /// Map from vertex to its position in `members`.
    pub fn positions(&self) -> HashMap<usize, usize> {
        self.members.iter().enumerate().map(|(i, &v)| (v, i)).collect()
    }
}

pub fn ball(graph: &WeightedGraph, center: usize, radius: usize) -> Ball {
    let dist = graph.hop_distances(center, Some(radius));
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); radius + 1];
    for (v, &d) in dist.iter().enumerate() {
        if d <= radius {
            layers[d].push(v);
        }
    }
    let mut members = Vec::new();
    let mut layer_ends = Vec::with_capacity(radius + 1);
    for layer in layers {
        // indices are visited in increasing order, so each layer is sorted
        members.extend(layer);
        layer_ends.push(members.len());
    }
    Ball { center, radius, members, layer_ends }
}

/// Quantities behind the two alternative standing assumptions: a bounded
/// Laplacian, or completeness together with a non-degenerate measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// `max_x Deg(x)`.
    pub a1_bound: f64,
    /// `min_x m(x)`.
    pub a2_inf_m: f64,
    /// Finite graphs always have a bounded Laplacian.
    pub a1_holds: bool,
    pub a2_measure_nondegenerate: bool,
}

pub fn check_assumption_a(graph: &WeightedGraph) -> AssumptionReport {
    let a1_bound = (0..graph.num_vertices()).map(|x| graph.weighted_degree(x)).fold(f64::NEG_INFINITY, f64::max);
    let a2_inf_m = graph.measure.iter().copied().fold(f64::INFINITY, f64::min);
    AssumptionReport { a1_bound, a2_inf_m, a1_holds: a1_bound.is_finite(), a2_measure_nondegenerate: a2_inf_m > 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn rejects_invariant_violations() {
        let err = WeightedGraph::new(labels(2), vec![1.0, 1.0], [(0, 1, 0.0)]).unwrap_err();
        assert!(matches!(err, GraphError::NonPositiveWeight { .. }));
        let err = WeightedGraph::new(labels(2), vec![1.0, -1.0], [(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, GraphError::NonPositiveMeasure { .. }));
        let err = WeightedGraph::new(labels(2), vec![1.0, 1.0], [(0, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop(_)));
        let err = WeightedGraph::new(labels(2), vec![1.0, 1.0], [(0, 1, 1.0), (1, 0, 2.0)]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge(..)));
        let err = WeightedGraph::new(labels(4), vec![1.0; 4], [(0, 1, 1.0), (2, 3, 1.0)]).unwrap_err();
        assert!(matches!(err, GraphError::Disconnected { components: 2 }));
        let err = WeightedGraph::new(Vec::new(), Vec::new(), []).unwrap_err();
        assert!(matches!(err, GraphError::Empty));
    }

    #[test]
    fn weighted_degree_examples() {
        let k2 = generate(Family::Complete(2), WeightMode::Physical).unwrap();
        assert_eq!(k2.weighted_degree(0), 1.0);
        let star = generate(Family::Star(5), WeightMode::Physical).unwrap();
        assert_eq!(star.weighted_degree(0), 5.0);
        let tree = generate(Family::RegularTree { degree: 3, depth: 3 }, WeightMode::Normalized).unwrap();
        assert!((0..tree.num_vertices()).all(|x| tree.weighted_degree(x) == 1.0));
    }

    #[test]
    fn assumption_examples() {
        let k2 = generate(Family::Complete(2), WeightMode::Physical).unwrap();
        let report = check_assumption_a(&k2);
        assert_eq!((report.a1_bound, report.a2_inf_m), (1.0, 1.0));
        let star = generate(Family::Star(9), WeightMode::Physical).unwrap();
        assert_eq!(check_assumption_a(&star).a1_bound, 9.0);
        let cube = generate(Family::Hypercube(3), WeightMode::Normalized).unwrap();
        assert_eq!(check_assumption_a(&cube).a1_bound, 1.0);
    }

    #[test]
    fn ball_examples() {
        let c6 = generate(Family::Cycle(6), WeightMode::Physical).unwrap();
        let b1 = ball(&c6, 0, 1);
        assert_eq!(b1.members, vec![0, 1, 5]);
        let b2 = ball(&c6, 0, 2);
        assert_eq!(b2.members, vec![0, 1, 5, 2, 4]);
        assert_eq!(b2.sphere(2), &[2, 4]);
        assert_eq!(b2.within(1), b1.members.as_slice());
        let k4 = generate(Family::Complete(4), WeightMode::Physical).unwrap();
        assert_eq!(ball(&k4, 2, 2).len(), 4);
        assert_eq!(ball(&k4, 2, 0).members, vec![2]);
    }

    #[test]
    fn detects_modes() {
        let c5 = generate(Family::Cycle(5), WeightMode::Physical).unwrap();
        assert_eq!(c5.detect_mode(), WeightMode::Physical);
        let c5n = c5.remeasured(WeightMode::Normalized).unwrap();
        assert_eq!(c5n.detect_mode(), WeightMode::Normalized);
        assert_eq!(c5n.measures(), &[2.0; 5]);
        let odd = c5.rescaled(1.0, 3.0).unwrap();
        assert_eq!(odd.detect_mode(), WeightMode::Custom);
    }
}
