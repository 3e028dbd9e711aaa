// SPDX-License-Identifier: Apache-2.0

//! Flat-file formats: edge lists, seed and community files, solution TSV and
//! key-value metadata.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use pcut_core::{Graph, GraphBuilder, NodeSet, Solution, SparseVector};

/// Header of the solution TSV.
pub const SOLUTION_HEADER: &str = "node\tx\tg";

/// Comment directive that fixes the node count of an edge list, so trailing
/// isolated nodes survive a round trip.
const NODES_DIRECTIVE: &str = "# nodes ";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: pcut_core::Error,
    },

    #[error("{0}")]
    Invalid(String),
}

pub type IoResult<T> = Result<T, IoError>;

pub fn read_file(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> IoResult<()> {
    fs::write(path, contents).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Scientific notation with 17 significant digits, exact on re-parse.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_id(token: &str, line: usize) -> IoResult<usize> {
    token.parse().map_err(|e| IoError::Parse {
        line,
        message: format!("bad node id {token:?}: {e}"),
    })
}

fn parse_real(token: &str, line: usize) -> IoResult<f64> {
    token.parse().map_err(|e| IoError::Parse {
        line,
        message: format!("bad number {token:?}: {e}"),
    })
}

/// Parses `u v [w]` lines. The node count is one past the largest id, or the
/// value of a `# nodes N` line if that is larger.
pub fn parse_edge_list(text: &str) -> IoResult<Graph> {
    let mut declared = 0usize;
    for (k, raw) in text.lines().enumerate() {
        if let Some(rest) = raw.trim().strip_prefix(NODES_DIRECTIVE) {
            declared = declared.max(parse_id(rest.trim(), k + 1)?);
        }
    }
    let mut edges = Vec::new();
    let mut max_id = None::<usize>;
    for (line, l) in content_lines(text) {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if !(2..=3).contains(&tokens.len()) {
            return Err(IoError::Parse {
                line,
                message: format!("expected `u v [w]`, found {} fields", tokens.len()),
            });
        }
        let u = parse_id(tokens[0], line)?;
        let v = parse_id(tokens[1], line)?;
        let w = match tokens.get(2) {
            Some(t) => parse_real(t, line)?,
            None => 1.0,
        };
        let top = u.max(v);
        if top == usize::MAX {
            return Err(IoError::Parse {
                line,
                message: "node id overflow".into(),
            });
        }
        max_id = Some(max_id.map_or(top, |m| m.max(top)));
        edges.push((line, u, v, w));
    }
    let n = max_id.map_or(0, |m| m + 1).max(declared);
    let mut b = GraphBuilder::new(n);
    for (line, u, v, w) in edges {
        b.add_edge(u, v, w).map_err(|source| IoError::Graph { line, source })?;
    }
    Ok(b.build())
}

pub fn load_graph(path: &Path) -> IoResult<Graph> {
    parse_edge_list(&read_file(path)?)
}

/// One `u v w` line per edge with `u < v`, ascending.
pub fn format_edge_list(graph: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{NODES_DIRECTIVE}{}", graph.node_count());
    for (u, v, w) in graph.edges() {
        let _ = writeln!(out, "{u} {v} {}", format_f64(w));
    }
    out
}

/// One node id per line.
pub fn parse_seeds(text: &str) -> IoResult<NodeSet> {
    let mut ids = Vec::new();
    for (line, l) in content_lines(text) {
        ids.push(parse_id(l, line)?);
    }
    if ids.is_empty() {
        return Err(IoError::Invalid("seed file lists no nodes".into()));
    }
    Ok(NodeSet::new(ids))
}

pub fn format_node_set(set: &NodeSet) -> String {
    let mut out = String::new();
    for i in set.iter() {
        let _ = writeln!(out, "{i}");
    }
    out
}

/// One community per line as space-separated ids. Blank lines are rejected as
/// empty communities; `#` lines are skipped.
pub fn parse_communities(text: &str) -> IoResult<Vec<NodeSet>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.starts_with('#') {
            continue;
        }
        if l.is_empty() {
            // A trailing newline at end of file is not a community.
            if text.lines().skip(k).all(|r| r.trim().is_empty()) {
                break;
            }
            return Err(IoError::Parse {
                line,
                message: "empty community".into(),
            });
        }
        let ids = l.split_whitespace().map(|t| parse_id(t, line)).collect::<IoResult<Vec<_>>>()?;
        out.push(NodeSet::new(ids));
    }
    Ok(out)
}

pub fn format_communities(communities: &[NodeSet]) -> String {
    let mut out = String::new();
    for c in communities {
        let ids: Vec<String> = c.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{}", ids.join(" "));
    }
    out
}

/// `node<TAB>x<TAB>g` for each support node, ascending.
pub fn format_solution(x: &Solution, residual: &SparseVector) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SOLUTION_HEADER}");
    for (i, v) in x.iter() {
        let _ = writeln!(out, "{i}\t{}\t{}", format_f64(v), format_f64(residual.get(i)));
    }
    out
}

/// Reads the solution TSV written by [`format_solution`], returning `x` and `g`.
pub fn parse_solution(text: &str) -> IoResult<(Solution, SparseVector)> {
    let mut x = Vec::new();
    let mut g = Vec::new();
    for (line, l) in content_lines(text) {
        if l == SOLUTION_HEADER {
            continue;
        }
        let fields: Vec<&str> = l.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(IoError::Parse {
                line,
                message: format!("expected `node<TAB>x[<TAB>g]`, found {} fields", fields.len()),
            });
        }
        let i = parse_id(fields[0], line)?;
        let v = parse_real(fields[1], line)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(IoError::Parse {
                line,
                message: format!("solution value {v} outside [0, 1]"),
            });
        }
        x.push((i, v));
        if let Some(t) = fields.get(2) {
            g.push((i, parse_real(t, line)?));
        }
    }
    Ok((SparseVector::from_pairs(x), SparseVector::from_pairs(g)))
}

/// Flat `key=value` document that keeps insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn set_f64(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.set(key, format_f64(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, other: &Metadata) {
        for (k, v) in &other.entries {
            self.set(k.clone(), v);
        }
    }

    pub fn parse(text: &str) -> IoResult<Self> {
        let mut m = Self::new();
        for (line, l) in content_lines(text) {
            let (k, v) = l.split_once('=').ok_or_else(|| IoError::Parse {
                line,
                message: "expected `key=value`".into(),
            })?;
            m.set(k.trim(), v.trim());
        }
        Ok(m)
    }
}

impl std::fmt::Display for Metadata {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_path() {
        let g = parse_edge_list("0 1\n1 2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn reciprocal_merge() {
        let g = parse_edge_list("0 1 2.5\n1 0 2.5\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(2.5));
    }

    #[test]
    fn rejections_carry_line_numbers() {
        let e = parse_edge_list("0 0 1.0").unwrap_err();
        assert!(matches!(e, IoError::Graph { line: 1, source: pcut_core::Error::SelfLoop(0) }), "{e}");
        let e = parse_edge_list("# c\n0 1 1\n1 0 2\n").unwrap_err();
        assert!(matches!(e, IoError::Graph { line: 3, .. }), "{e}");
        let e = parse_edge_list("0 1\n1 2 -1\n").unwrap_err();
        assert!(matches!(e, IoError::Graph { line: 2, .. }), "{e}");
        let e = parse_edge_list("0 1\n\n1 x\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 3, .. }), "{e}");
        let e = parse_edge_list("0 1 1 1\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 1, .. }), "{e}");
        let e = parse_edge_list("0 99999999999999999999999\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 1, .. }), "{e}");
    }

    #[test]
    fn nodes_directive_keeps_isolated_tail() {
        let g = Graph::from_edges(5, [(0, 1, 0.3)]).unwrap();
        let h = parse_edge_list(&format_edge_list(&g)).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn communities_reject_blank_lines() {
        let c = parse_communities("0 1 2\n3 4\n\n").unwrap();
        assert_eq!(c.len(), 2);
        assert!(parse_communities("0 1\n\n2 3\n").is_err());
    }

    #[test]
    fn solution_round_trip() {
        let x = Solution::from_pairs([(2, 0.1), (7, 1.0 / 3.0)]);
        let g = SparseVector::from_pairs([(2, 1e-300), (7, -0.25)]);
        let text = format_solution(&x, &g);
        assert!(text.starts_with("node\tx\tg\n2\t1.0000000000000001e-1\t"));
        let (x2, g2) = parse_solution(&text).unwrap();
        assert_eq!(x, x2);
        assert_eq!(g, g2);
    }

    #[test]
    fn metadata_round_trip() {
        let mut m = Metadata::new();
        m.set("gamma", 0.1).set_f64("work", 2.5).set("gamma", 0.2);
        let text = m.to_string();
        assert_eq!(text, "gamma=0.2\nwork=2.5000000000000000e0\n");
        assert_eq!(Metadata::parse(&text).unwrap(), m);
    }
}
