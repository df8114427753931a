//! Graph files.
//!
//! JSON:
//! `{"vertices":[{"id":"a","m":1.0},...],"edges":[{"u":"a","v":"b","mu":1.0},...]}`
//!
//! TSV: one `u v mu` edge per line (tab or space separated, `#` comments).
//! TSV carries no measure; it is supplied by a [`WeightMode`].

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GraphError, WeightMode, WeightedGraph};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: String,
    m: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    u: String,
    v: String,
    mu: f64,
}

pub(crate) fn is_tsv(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("tsv" | "txt" | "edges"))
}

/// Loads a graph, choosing the format from the extension (`.tsv`, `.txt`,
/// `.edges` are edge lists, anything else JSON).
///
/// For JSON, `mode` of `Normalized`/`Physical` replaces the stored measure;
/// `Custom` or `None` keeps it. For TSV the measure comes from `mode`
/// (physical when `None`).
pub fn load(path: impl AsRef<Path>, mode: Option<WeightMode>) -> Result<WeightedGraph, GraphError> {
    let path = path.as_ref();
    if is_tsv(path) {
        load_tsv(path, mode.unwrap_or(WeightMode::Physical))
    } else {
        let graph = load_json(path)?;
        match mode {
            Some(m @ (WeightMode::Normalized | WeightMode::Physical)) => graph.remeasured(m),
            _ => Ok(graph),
        }
    }
}

pub fn save(graph: &WeightedGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let path = path.as_ref();
    if is_tsv(path) {
        save_tsv(graph, path)
    } else {
        save_json(graph, path)
    }
}

pub fn load_json(path: impl AsRef<Path>) -> Result<WeightedGraph, GraphError> {
    parse_json(&fs::read_to_string(path)?)
}

pub fn parse_json(text: &str) -> Result<WeightedGraph, GraphError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
    let mut index = HashMap::with_capacity(file.vertices.len());
    let mut labels = Vec::with_capacity(file.vertices.len());
    let mut measure = Vec::with_capacity(file.vertices.len());
    for (i, vertex) in file.vertices.into_iter().enumerate() {
        if index.insert(vertex.id.clone(), i).is_some() {
            return Err(GraphError::DuplicateVertex(vertex.id));
        }
        labels.push(vertex.id);
        measure.push(vertex.m);
    }
    let edges = file
        .edges
        .into_iter()
        .map(|e| {
            let u = *index.get(&e.u).ok_or_else(|| GraphError::UnknownVertex(e.u.clone()))?;
            let v = *index.get(&e.v).ok_or_else(|| GraphError::UnknownVertex(e.v.clone()))?;
            Ok((u, v, e.mu))
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    WeightedGraph::new(labels, measure, edges)
}

pub fn to_json(graph: &WeightedGraph) -> String {
    let file = GraphFile {
        vertices: (0..graph.num_vertices())
            .map(|x| VertexRecord { id: graph.label(x).to_owned(), m: graph.measure(x) })
            .collect(),
        edges: graph
            .edges()
            .map(|(u, v, mu)| EdgeRecord { u: graph.label(u).to_owned(), v: graph.label(v).to_owned(), mu })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("graph serializes");
    text.push('\n');
    text
}

pub fn save_json(graph: &WeightedGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    fs::write(path, to_json(graph))?;
    Ok(())
}

pub fn load_tsv(path: impl AsRef<Path>, mode: WeightMode) -> Result<WeightedGraph, GraphError> {
    parse_tsv(&fs::read_to_string(path)?, mode)
}

/// Vertices are numbered in order of first appearance.
pub fn parse_tsv(text: &str, mode: WeightMode) -> Result<WeightedGraph, GraphError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, mu] = fields[..] else {
            return Err(GraphError::Malformed(format!(
                "line {}: expected `u v mu`, got {} fields",
                lineno + 1,
                fields.len()
            )));
        };
        let mu: f64 =
            mu.parse().map_err(|_| GraphError::Malformed(format!("line {}: bad weight `{mu}`", lineno + 1)))?;
        let mut ends = [0usize; 2];
        for (end, label) in ends.iter_mut().zip([u, v]) {
            *end = *index.entry(label).or_insert_with(|| {
                labels.push(label.to_owned());
                labels.len() - 1
            });
        }
        edges.push((ends[0], ends[1], mu));
    }
    WeightedGraph::with_mode(labels, edges, mode)
}

pub fn to_tsv(graph: &WeightedGraph) -> String {
    graph.edges().map(|(u, v, mu)| format!("{}\t{}\t{}\n", graph.label(u), graph.label(v), mu)).collect()
}

pub fn save_tsv(graph: &WeightedGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    fs::write(path, to_tsv(graph))?;
    Ok(())
}
