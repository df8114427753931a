use std::fmt;
use std::str::FromStr;

use super::{GraphError, WeightMode, WeightedGraph};

const MAX_VERTICES: usize = 1 << 22;

/// Graph families with unit edge weights.
///
/// The textual form is `family:param1:param2`, e.g. `cycle:8`,
/// `torus:2:16`, `hypercube:3`, `tree:3:4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Path(usize),
    Cycle(usize),
    /// `Z_side^dim` with nearest-neighbor edges.
    Torus {
        dim: usize,
        side: usize,
    },
    Hypercube(usize),
    Complete(usize),
    /// A center joined to `leaves` leaves.
    Star(usize),
    /// Root with `degree` children, every other internal vertex with
    /// `degree - 1` children, truncated at `depth`.
    RegularTree {
        degree: usize,
        depth: usize,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Torus { dim, side } => write!(f, "torus:{dim}:{side}"),
            Family::Hypercube(d) => write!(f, "hypercube:{d}"),
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Star(n) => write!(f, "star:{n}"),
            Family::RegularTree { degree, depth } => write!(f, "tree:{degree}:{depth}"),
        }
    }
}

impl FromStr for Family {
    type Err = GraphError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| GraphError::InvalidGenerator(format!("`{spec}`: {msg}"));
        let mut parts = spec.split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let params = parts
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad("parameters must be integers")))
            .collect::<Result<Vec<_>, _>>()?;
        let arity = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(bad(&format!("expected {k} parameter(s)")))
            }
        };
        let family = match name.as_str() {
            "path" => arity(1).map(|_| Family::Path(params[0])),
            "cycle" => arity(1).map(|_| Family::Cycle(params[0])),
            "torus" => arity(2).map(|_| Family::Torus { dim: params[0], side: params[1] }),
            "hypercube" | "cube" => arity(1).map(|_| Family::Hypercube(params[0])),
            "complete" => arity(1).map(|_| Family::Complete(params[0])),
            "star" => arity(1).map(|_| Family::Star(params[0])),
            "tree" | "regular_tree" => arity(2).map(|_| Family::RegularTree { degree: params[0], depth: params[1] }),
            _ => Err(bad("unknown family")),
        }?;
        family.validate()?;
        Ok(family)
    }
}

impl Family {
    fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidGenerator(format!("{self}: {msg}")));
        match *self {
            Family::Path(n) | Family::Complete(n) if n < 1 => bad("need at least 1 vertex".into()),
            Family::Cycle(n) if n < 3 => bad("cycles need at least 3 vertices".into()),
            Family::Torus { dim, .. } if dim < 1 => bad("dimension must be ≥ 1".into()),
            Family::Torus { side, .. } if side < 3 => bad("side length must be ≥ 3".into()),
            Family::Hypercube(d) if d < 1 => bad("dimension must be ≥ 1".into()),
            Family::Star(n) if n < 1 => bad("need at least 1 leaf".into()),
            Family::RegularTree { degree, .. } if degree < 1 => bad("degree must be ≥ 1".into()),
            _ => match self.vertex_count() {
                Some(n) if n <= MAX_VERTICES => Ok(()),
                _ => bad(format!("more than {MAX_VERTICES} vertices")),
            },
        }
    }

    fn vertex_count(&self) -> Option<usize> {
        match *self {
            Family::Path(n) | Family::Cycle(n) | Family::Complete(n) => Some(n),
            Family::Torus { dim, side } => side.checked_pow(u32::try_from(dim).ok()?),
            Family::Hypercube(d) => 1usize.checked_shl(u32::try_from(d).ok()?).filter(|_| d < 63),
            Family::Star(n) => n.checked_add(1),
            Family::RegularTree { degree, depth } => {
                let mut total: usize = 1;
                let mut level: usize = 1;
                for k in 0..depth {
                    level = level.checked_mul(if k == 0 { degree } else { degree - 1 })?;
                    if level == 0 {
                        break;
                    }
                    total = total.checked_add(level)?;
                }
                Some(total)
            }
        }
    }

    fn edges(&self) -> (usize, Vec<(usize, usize, f64)>) {
        let mut edges = Vec::new();
        let n = match *self {
            Family::Path(n) => {
                edges.extend((1..n).map(|i| (i - 1, i, 1.0)));
                n
            }
            Family::Cycle(n) => {
                edges.extend((0..n).map(|i| (i, (i + 1) % n, 1.0)));
                n
            }
            Family::Torus { dim, side } => {
                let n = side.pow(dim as u32);
                for x in 0..n {
                    let mut stride = 1;
                    for _ in 0..dim {
                        let coord = (x / stride) % side;
                        let y = x - coord * stride + ((coord + 1) % side) * stride;
                        edges.push((x, y, 1.0));
                        stride *= side;
                    }
                }
                n
            }
            Family::Hypercube(d) => {
                let n = 1usize << d;
                for x in 0..n {
                    for bit in 0..d {
                        let y = x ^ (1 << bit);
                        if x < y {
                            edges.push((x, y, 1.0));
                        }
                    }
                }
                n
            }
            Family::Complete(n) => {
                for x in 0..n {
                    edges.extend((x + 1..n).map(|y| (x, y, 1.0)));
                }
                n
            }
            Family::Star(leaves) => {
                edges.extend((1..=leaves).map(|y| (0, y, 1.0)));
                leaves + 1
            }
            Family::RegularTree { degree, depth } => {
                let mut frontier = vec![0usize];
                let mut next_id = 1;
                for level in 0..depth {
                    let children = if level == 0 { degree } else { degree - 1 };
                    let mut next = Vec::with_capacity(frontier.len() * children);
                    for &parent in &frontier {
                        for _ in 0..children {
                            edges.push((parent, next_id, 1.0));
                            next.push(next_id);
                            next_id += 1;
                        }
                    }
                    frontier = next;
                }
                next_id
            }
        };
        (n, edges)
    }
}

/// Builds a member of `family` with unit edge weights and the measure set
/// by `mode`.
pub fn generate(family: Family, mode: WeightMode) -> Result<WeightedGraph, GraphError> {
    family.validate()?;
    if mode == WeightMode::Custom {
        return Err(GraphError::InvalidMode(mode));
    }
    let (n, edges) = family.edges();
    let labels = (0..n).map(|i| i.to_string()).collect();
    WeightedGraph::with_mode(labels, edges, mode)
}
