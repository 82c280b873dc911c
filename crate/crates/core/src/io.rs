//! Plain-text formats.
//!
//! Edge list: a header line `N M` followed by exactly `M` lines `i j` with
//! `i < j`. Blank lines and lines starting with `#` are ignored on input.
//! The writer emits edges sorted, so equal graphs give identical files.
//!
//! Coloring: one `node color` line per node, any order.
//!
//! Grid: `start:stop:step`, inclusive of `stop` up to rounding.

use std::fmt::Write as _;

use crate::coloring::Coloring;
use crate::error::{GraphError, ParseError};
use crate::graph::Graph;

/// Upper bound on grid points accepted by [`parse_grid`].
pub const MAX_GRID_POINTS: usize = 1_000_000;
/// Upper bound on the node count in an edge-list header.
pub const MAX_NODES: usize = 100_000_000;

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn two_fields<T: std::str::FromStr>(line_no: usize, line: &str) -> Result<(T, T), ParseError> {
    let mut it = line.split_whitespace();
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(syntax(line_no, format!("expected two fields, got {line:?}")));
    };
    let parse = |s: &str| s.parse::<T>().map_err(|_| syntax(line_no, format!("not a valid number: {s:?}")));
    Ok((parse(a)?, parse(b)?))
}

pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (header_no, header) = lines.next().ok_or_else(|| syntax(1, "missing `N M` header"))?;
    let (n, m): (usize, usize) = two_fields(header_no, header)?;
    if n > MAX_NODES {
        return Err(syntax(header_no, format!("node count {n} exceeds {MAX_NODES}")));
    }
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_edges {
        return Err(syntax(header_no, format!("{m} edges cannot fit a simple graph on {n} nodes")));
    }
    let mut edges = Vec::with_capacity(m.min(1 << 20));
    for (line_no, line) in lines {
        let (i, j): (usize, usize) = two_fields(line_no, line)?;
        if i >= j {
            return Err(syntax(line_no, format!("edge ({i}, {j}) must have i < j")));
        }
        if j >= n {
            return Err(GraphError::NodeOutOfRange { node: j, n_nodes: n }.into());
        }
        if edges.len() == m {
            return Err(syntax(line_no, format!("more than the {m} declared edges")));
        }
        edges.push((i, j));
    }
    if edges.len() != m {
        return Err(syntax(header_no, format!("header declares {m} edges, found {}", edges.len())));
    }
    Ok(Graph::from_edges(n, &edges)?)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 * (g.n_edges() + 1));
    writeln!(out, "{} {}", g.n_nodes(), g.n_edges()).unwrap();
    for (i, j) in g.sorted_edges() {
        writeln!(out, "{i} {j}").unwrap();
    }
    out
}

/// Reads `node color` lines for a graph on `n` nodes; every node must
/// appear exactly once.
pub fn parse_coloring(text: &str, n: usize, q: usize) -> Result<Coloring, ParseError> {
    let mut colors = vec![0usize; n];
    for (line_no, line) in content_lines(text) {
        let (v, c): (usize, usize) = two_fields(line_no, line)?;
        if v >= n {
            return Err(syntax(line_no, format!("node {v} out of range for {n} nodes")));
        }
        if c == 0 || c > q {
            return Err(syntax(line_no, format!("color {c} out of range 1..={q}")));
        }
        if colors[v] != 0 {
            return Err(syntax(line_no, format!("node {v} colored twice")));
        }
        colors[v] = c;
    }
    if let Some(missing) = colors.iter().position(|&c| c == 0) {
        return Err(syntax(0, format!("node {missing} has no color")));
    }
    Coloring::new(q, colors).map_err(|e| syntax(0, e.to_string()))
}

pub fn write_coloring(s: &Coloring) -> String {
    let mut out = String::with_capacity(8 * s.len());
    for (v, c) in s.colors.iter().enumerate() {
        writeln!(out, "{v} {c}").unwrap();
    }
    out
}

/// Parses `start:stop:step` into the points `start + k*step <= stop`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, ParseError> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(syntax(1, format!("expected start:stop:step, got {spec:?}")));
    };
    let num = |s: &str| -> Result<f64, ParseError> {
        let x: f64 = s.trim().parse().map_err(|_| syntax(1, format!("not a number: {s:?}")))?;
        if !x.is_finite() {
            return Err(syntax(1, format!("not finite: {s:?}")));
        }
        Ok(x)
    };
    let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
    if !(step > 0.0) {
        return Err(syntax(1, "step must be positive"));
    }
    if stop < start {
        return Err(syntax(1, "stop must not be below start"));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if !(count < MAX_GRID_POINTS as f64) {
        return Err(syntax(1, format!("more than {MAX_GRID_POINTS} grid points")));
    }
    // Multiply rather than accumulate so points do not drift.
    Ok((0..=count as usize).map(|k| start + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, DegreeModel};

    #[test]
    fn edge_list_round_trip_is_canonical() {
        let g = generate(DegreeModel::Gnp { z: 3.0 }, 300, 2).unwrap();
        let text = write_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(back.sorted_edges(), g.sorted_edges());
        assert_eq!(write_edge_list(&back), text);
    }

    #[test]
    fn edge_list_errors() {
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("3 1\n1 0\n").is_err());
        assert!(parse_edge_list("3 1\n0 3\n").is_err());
        assert!(parse_edge_list("3 2\n0 1\n").is_err());
        assert!(parse_edge_list("3 1\n0 1\n1 2\n").is_err());
        assert!(parse_edge_list("3 2\n0 1\n0 1\n").is_err());
        assert!(parse_edge_list("3 1\n0 x\n").is_err());
        assert!(parse_edge_list("3 1\n0 1 2\n").is_err());
        assert!(parse_edge_list("2 5\n").is_err());
    }

    #[test]
    fn edge_list_comments_and_blanks() {
        let g = parse_edge_list("# triangle\n3 3\n\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(g.n_edges(), 3);
        assert_eq!(parse_edge_list("4 0\n").unwrap().n_nodes(), 4);
    }

    #[test]
    fn coloring_parsing() {
        let s = parse_coloring("1 2\n0 1\n2 3\n", 3, 3).unwrap();
        assert_eq!(s.colors, vec![1, 2, 3]);
        assert_eq!(parse_coloring(&write_coloring(&s), 3, 3).unwrap(), s);
        assert!(parse_coloring("0 1\n", 2, 3).is_err());
        assert!(parse_coloring("0 1\n0 2\n", 1, 3).is_err());
        assert!(parse_coloring("0 4\n", 1, 3).is_err());
        assert!(parse_coloring("0 0\n", 1, 3).is_err());
        assert!(parse_coloring("5 1\n", 1, 3).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:1:0.25").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:1:0.01").unwrap().len(), 101);
        assert_eq!(parse_grid("4.3:4.8:0.1").unwrap().len(), 6);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        for bad in ["", "1:2", "0:1:0", "0:1:-1", "1:0:0.1", "a:1:0.1", "0:inf:1", "0:1e12:1e-3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
