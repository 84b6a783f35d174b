//! Graph and homomorphism file formats used by the CLI: a DIMACS-flavored
//! edge-list format for graphs and a small JSON object for vertex maps.
//!
//! Graph files are line-oriented ASCII: comment lines `c ...`, one header
//! `p edge <n> <m>`, then `m` lines `e <u> <v>` with 1-based vertex indices.
//! Emission is normalized (sorted edges), so `emit(parse(file))` is
//! byte-identical for normalized files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Homomorphism};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph spec '{0}': expected cycle:n | path:n | clique:n | circ:p/q | petersen | file:PATH")]
    BadSpec(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("io error: {0}")]
    File(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Parses the DIMACS-flavored edge-list format.
pub fn parse_dimacs(text: &str) -> Result<Graph, IoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('c') {
            continue;
        }
        let mut tok = l.split_whitespace();
        match tok.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(IoError::Parse {
                        line,
                        msg: "duplicate header".into(),
                    });
                }
                if tok.next() != Some("edge") {
                    return Err(IoError::Parse {
                        line,
                        msg: "expected 'p edge <n> <m>'".into(),
                    });
                }
                let n = parse_num(tok.next(), line)?;
                let m = parse_num(tok.next(), line)?;
                header = Some((n, m));
            }
            Some("e") => {
                if header.is_none() {
                    return Err(IoError::Parse {
                        line,
                        msg: "edge before header".into(),
                    });
                }
                let u: usize = parse_num(tok.next(), line)?;
                let v: usize = parse_num(tok.next(), line)?;
                if u == 0 || v == 0 {
                    return Err(IoError::Parse {
                        line,
                        msg: "vertex indices are 1-based".into(),
                    });
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => {
                return Err(IoError::Parse {
                    line,
                    msg: format!("unknown line type '{other}'"),
                })
            }
            None => {}
        }
    }
    let (n, m) = header.ok_or(IoError::Parse {
        line: 0,
        msg: "missing 'p edge' header".into(),
    })?;
    if edges.len() != m {
        return Err(IoError::Parse {
            line: 0,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok(Graph::new(n, &edges)?)
}

fn parse_num(tok: Option<&str>, line: usize) -> Result<usize, IoError> {
    tok.and_then(|t| t.parse().ok()).ok_or(IoError::Parse {
        line,
        msg: "expected a number".into(),
    })
}

/// Emits the normalized DIMACS form: header, then edges sorted ascending,
/// 1-based.
pub fn emit_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

/// Builds a graph from a builtin spec or a file reference.
/// Grammar: `cycle:n | path:n | clique:n | circ:p/q | petersen | file:PATH`.
pub fn parse_graph_spec(spec: &str) -> Result<Graph, IoError> {
    if spec == "petersen" {
        return Ok(Graph::petersen());
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        return parse_dimacs(&text);
    }
    if let Some(pq) = spec.strip_prefix("circ:") {
        let (p, q) = parse_fraction(pq).ok_or_else(|| IoError::BadSpec(spec.into()))?;
        return Ok(Graph::circular_clique(p, q)?);
    }
    let (kind, num) = spec.split_once(':').ok_or_else(|| IoError::BadSpec(spec.into()))?;
    let n: usize = num.parse().map_err(|_| IoError::BadSpec(spec.into()))?;
    match kind {
        "cycle" => {
            if n < 3 {
                return Err(IoError::InvalidParams(format!("cycle:{n} needs n >= 3")));
            }
            Ok(Graph::cycle(n))
        }
        "path" => {
            if n == 0 {
                return Err(IoError::InvalidParams("path:0 is empty".into()));
            }
            Ok(Graph::path(n))
        }
        "clique" => Ok(Graph::clique(n)),
        _ => Err(IoError::BadSpec(spec.into())),
    }
}

/// Parses `p/q` into a numerator and denominator.
pub fn parse_fraction(s: &str) -> Option<(usize, usize)> {
    let (p, q) = s.split_once('/')?;
    Some((p.trim().parse().ok()?, q.trim().parse().ok()?))
}

/// JSON representation of a vertex map: `{"n": ..., "k": ..., "map": [...]}`,
/// 0-based.
#[derive(Debug, Serialize, Deserialize)]
pub struct HomFile {
    pub n: usize,
    pub k: usize,
    pub map: Vec<usize>,
}

impl HomFile {
    pub fn from_hom(h: &Homomorphism) -> HomFile {
        HomFile {
            n: h.domain_order(),
            k: h.codomain_order(),
            map: h.map().to_vec(),
        }
    }

    pub fn into_hom(self) -> Result<Homomorphism, IoError> {
        if self.map.len() != self.n {
            return Err(IoError::InvalidParams(format!(
                "map length {} does not match n={}",
                self.map.len(),
                self.n
            )));
        }
        Ok(Homomorphism::new_unchecked(self.map, self.k))
    }
}

pub fn load_hom(path: &str) -> Result<Homomorphism, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: HomFile = serde_json::from_str(&text)?;
    file.into_hom()
}
