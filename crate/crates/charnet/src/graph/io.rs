//! Weighted edge list and vertex table files.
//!
//! The edge list is `u<TAB>v<TAB>weight`, one edge per line, with `#`
//! comment lines allowed. Plain two-column lists (weight omitted) import
//! with weight 1, which covers external networks published as bare edge
//! lists.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::corpus::{Character, CorpusError, Sex};

use super::{CharacterGraph, Provenance};

/// Writes the weighted edge list, one `u v weight` line per edge, with
/// endpoint ids ordered lexicographically. `header` lines are emitted as
/// leading `#` comments.
pub fn write_edge_list(
    graph: &CharacterGraph,
    path: &Path,
    header: &[String],
) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    for line in header {
        writeln!(out, "# {line}").map_err(io_err)?;
    }
    for (u, v, w) in graph.edges() {
        writeln!(out, "{}\t{}\t{}", graph.id(u), graph.id(v), w).map_err(io_err)?;
    }
    fs::write(path, out).map_err(io_err)
}

/// Writes the vertex attribute table with degree and strength columns.
pub fn write_vertex_table(
    graph: &CharacterGraph,
    path: &Path,
    header: &[String],
) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    for line in header {
        writeln!(out, "# {line}").map_err(io_err)?;
    }
    writeln!(out, "id\tname\tnamed\tsex\tcollective\tdegree\tstrength").map_err(io_err)?;
    for v in 0..graph.vertex_count() {
        let c = graph.character(v);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.id,
            c.name.as_deref().unwrap_or(""),
            c.named as u8,
            c.sex.code(),
            c.collective as u8,
            graph.degree(v),
            graph.strength(v),
        )
        .map_err(io_err)?;
    }
    fs::write(path, out).map_err(io_err)
}

/// Reads a (possibly unweighted) edge list into a graph. Vertices get
/// placeholder attributes with unknown sex; parallel mentions of an edge
/// accumulate weight.
pub fn read_edge_list(path: &Path) -> Result<CharacterGraph, CorpusError> {
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut edges: Vec<(String, String, u32)> = Vec::new();
    let mut vertices: HashSet<String> = HashSet::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let u = fields.next();
        let v = fields.next();
        let w = fields.next();
        let (u, v) = match (u, v) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                return Err(CorpusError::Malformed {
                    file: path.display().to_string(),
                    line: idx + 1,
                    message: "expected `u v [weight]`".to_string(),
                })
            }
        };
        if u == v {
            return Err(CorpusError::Malformed {
                file: path.display().to_string(),
                line: idx + 1,
                message: format!("self-loop on `{u}`"),
            });
        }
        let weight = match w {
            None => 1,
            Some(w) => w.parse::<u32>().map_err(|_| CorpusError::Malformed {
                file: path.display().to_string(),
                line: idx + 1,
                message: format!("weight must be a positive integer, found `{w}`"),
            })?,
        };
        vertices.insert(u.to_string());
        vertices.insert(v.to_string());
        edges.push((u.to_string(), v.to_string(), weight));
    }
    let attrs: Vec<Character> = vertices
        .into_iter()
        .map(|id| Character {
            id,
            name: None,
            named: false,
            sex: Sex::Unknown,
            collective: false,
        })
        .collect();
    Ok(CharacterGraph::from_weighted_edges(
        attrs,
        edges,
        Provenance {
            source: path.display().to_string(),
            scene_range: None,
            filter: None,
        },
    ))
}
