use std::io::{self, BufRead, Write};

use super::{fmt_real, normalize_coords, Counting};
use crate::actant::{ActantClass, ActantKey};
use crate::error::{Error, Result};
use crate::graph::{ActantGraph, Node};

/// Writes `*Vertices N`, the quoted vertex labels (with normalized
/// coordinates when the graph has them), `*Edges` and `i j w` lines sorted by
/// `(i, j)` with `i < j`. Returns the byte count.
pub fn write_pajek<W: Write>(g: &ActantGraph, sink: W) -> io::Result<usize> {
    let mut out = Counting::new(sink);
    writeln!(out, "*Vertices {}", g.node_count())?;
    let coords = g.coords().map(normalize_coords);
    for (i, n) in g.nodes().iter().enumerate() {
        write!(out, "{} \"{}\"", i + 1, pajek_label(&n.display))?;
        if let Some(c) = &coords {
            write!(out, " {} {}", fmt_real(c[i].0), fmt_real(c[i].1))?;
        }
        writeln!(out)?;
    }
    writeln!(out, "*Edges")?;
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.a + 1, e.b + 1, e.weight)?;
    }
    out.flush()?;
    Ok(out.count)
}

// Pajek has no quote escaping.
fn pajek_label(s: &str) -> String {
    s.replace('"', "'").replace('\n', " ")
}

/// Pajek partition file: `*Vertices N` then one cluster id per line.
pub fn write_clu<W: Write>(g: &ActantGraph, sink: W) -> Result<usize> {
    let partition = g
        .partition()
        .ok_or_else(|| Error::domain("graph has no partition"))?;
    let mut out = Counting::new(sink);
    writeln!(out, "*Vertices {}", partition.len())?;
    for c in partition {
        writeln!(out, "{c}")?;
    }
    out.flush()?;
    Ok(out.count)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PajekVertex {
    pub label: String,
    pub coords: Option<(f64, f64)>,
}

/// Parsed `.net` file.
#[derive(Debug, Clone, PartialEq)]
pub struct PajekDocument {
    pub vertices: Vec<PajekVertex>,
    /// 0-based endpoints as written, with weights.
    pub edges: Vec<(usize, usize, u64)>,
}

impl PajekDocument {
    /// Rebuilds a graph; node classes come from the label markers and
    /// document frequencies are unknown (zero).
    pub fn to_graph(&self) -> Result<ActantGraph> {
        let nodes = self
            .vertices
            .iter()
            .map(|v| {
                let class = ActantClass::from_label(&v.label);
                let canonical = v.label[class.marker().len()..].to_lowercase();
                Node {
                    key: ActantKey::new(class, canonical),
                    display: v.label.clone(),
                    doc_frequency: 0,
                }
            })
            .collect();
        let mut g = ActantGraph::new(nodes, self.edges.iter().copied())?;
        if self.vertices.iter().all(|v| v.coords.is_some()) && !self.vertices.is_empty() {
            g.set_coords(self.vertices.iter().map(|v| v.coords.unwrap()).collect())?;
        }
        Ok(g)
    }
}

enum Section {
    None,
    Vertices,
    Edges,
}

/// Reads the `*Vertices` / `*Edges` / `*Arcs` subset of the Pajek format.
/// Lines starting with `%` are comments. Edges without a weight get weight 1.
pub fn parse_pajek<R: BufRead>(source: R) -> Result<PajekDocument> {
    let mut declared = None;
    let mut vertices: Vec<PajekVertex> = Vec::new();
    let mut edges = Vec::new();
    let mut section = Section::None;
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let err = |message: String| Error::Parse { line: lineno, message };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('*') {
            let mut parts = rest.split_whitespace();
            let head = parts.next().unwrap_or("").to_ascii_lowercase();
            match head.as_str() {
                "vertices" => {
                    let n: usize = parts
                        .next()
                        .ok_or_else(|| err("missing vertex count".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad vertex count: {e}")))?;
                    declared = Some(n);
                    vertices.reserve(n);
                    section = Section::Vertices;
                }
                "edges" | "arcs" => section = Section::Edges,
                other => return Err(err(format!("unsupported section `*{other}`"))),
            }
            continue;
        }
        match section {
            Section::None => return Err(err("data before *Vertices".into())),
            Section::Vertices => {
                let (idx, rest) = trimmed
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("vertex line without label".into()))?;
                let idx: usize = idx.parse().map_err(|e| err(format!("bad vertex index: {e}")))?;
                if idx != vertices.len() + 1 {
                    return Err(err(format!("vertex {idx} out of sequence")));
                }
                let rest = rest.trim_start();
                let (label, tail) = if let Some(q) = rest.strip_prefix('"') {
                    let end = q.find('"').ok_or_else(|| err("unterminated label".into()))?;
                    (q[..end].to_string(), &q[end + 1..])
                } else {
                    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                    (rest[..end].to_string(), &rest[end..])
                };
                let nums: Vec<f64> = tail
                    .split_whitespace()
                    .take(2)
                    .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad coordinate: {e}"))))
                    .collect::<Result<_>>()?;
                let coords = (nums.len() == 2).then(|| (nums[0], nums[1]));
                vertices.push(PajekVertex { label, coords });
            }
            Section::Edges => {
                let mut parts = trimmed.split_whitespace();
                let mut endpoint = || -> Result<usize> {
                    let v: usize = parts
                        .next()
                        .ok_or_else(|| err("edge line needs two endpoints".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad endpoint: {e}")))?;
                    if v == 0 || v > vertices.len() {
                        return Err(err(format!("endpoint {v} outside [1, {}]", vertices.len())));
                    }
                    Ok(v - 1)
                };
                let a = endpoint()?;
                let b = endpoint()?;
                let w = match parts.next() {
                    Some(w) => w.parse::<u64>().map_err(|e| err(format!("bad weight: {e}")))?,
                    None => 1,
                };
                edges.push((a, b, w));
            }
        }
    }
    if let Some(n) = declared {
        if n != vertices.len() {
            return Err(Error::Parse {
                line: 0,
                message: format!("*Vertices declares {n} but {} listed", vertices.len()),
            });
        }
    }
    Ok(PajekDocument { vertices, edges })
}
