//! Simple undirected graphs and the combinatorial invariants the rank and
//! threshold formulas dispatch on.
//!
//! Vertices are stored as indices `0..n`. Every textual or JSON surface
//! (edge lists, reports, CLI output) uses the 1-based labels `1..=n`.

mod decompose;
mod generators;
mod invariants;

pub use decompose::{clique_separator_decomposition, CliqueSumTree};
pub use generators::Generator;
pub use invariants::{
    clique_number, is_chordal, k_core, maximum_clique, treewidth_at_most_2,
    treewidth_upper_bound, Subgraph,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on `n` vertices.
///
/// Edges are kept as ordered pairs `(i, j)` with `i < j`, sorted
/// lexicographically. That order is the edge coordinate order used by
/// partial matrices and Terracini matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from 0-based edges, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge {{{},{}}} outside vertex range 1..={}",
                    u + 1,
                    v + 1,
                    n
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {}", u + 1)));
            }
            if g.has_edge(u, v) {
                let (a, b) = (u.min(v), u.max(v));
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge {{{},{}}}",
                    a + 1,
                    b + 1
                )));
            }
            g.insert(u, v);
        }
        g.edges.sort_unstable();
        Ok(g)
    }

    fn insert(&mut self, u: usize, v: usize) {
        let (a, b) = (u.min(v), u.max(v));
        self.adj[a * self.n + b] = true;
        self.adj[b * self.n + a] = true;
        self.edges.push((a, b));
    }

    /// Parses the edge-list text format: a header line `n m` followed by `m`
    /// lines `u v` with `1 <= u < v <= n`. Blank lines and `#` comments are
    /// ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header line \"n m\"".into(),
        })?;
        let (n, m) = parse_pair(header, hline)?;
        if n == 0 {
            return Err(Error::Parse {
                line: hline,
                msg: "vertex count must be at least 1".into(),
            });
        }

        let mut g = Graph::empty(n);
        let mut count = 0;
        for (line, body) in lines {
            let (u, v) = parse_pair(body, line)?;
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(Error::VertexOutOfRange { vertex: w, n, line });
                }
            }
            if u >= v {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected u < v, found {u} {v}"),
                });
            }
            if g.has_edge(u - 1, v - 1) {
                return Err(Error::DuplicateEdge { u, v, line });
            }
            g.insert(u - 1, v - 1);
            count += 1;
        }
        if count != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header declares {m} edges, found {count}"),
            });
        }
        g.edges.sort_unstable();
        Ok(g)
    }

    /// Renders the graph in the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as 0-based pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adj[u * self.n + v]
    }

    /// Position of edge `{u, v}` in the lexicographic edge order.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Subgraph induced on `vertices`, relabeled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let k = vertices.len();
        let mut edges = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                if self.has_edge(vertices[a], vertices[b]) {
                    edges.push((a, b));
                }
            }
        }
        Graph::from_edges(k, edges).expect("induced subgraph of a simple graph is simple")
    }

    /// Connected components as sorted vertex lists, ordered by smallest
    /// vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Returns a proper 2-coloring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                let cv = color[v].unwrap();
                for u in self.neighbors(v) {
                    match color[u] {
                        None => {
                            color[u] = Some(!cv);
                            stack.push(u);
                        }
                        Some(cu) if cu == cv => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap()).collect())
    }

    /// Recognizes a complete bipartite graph `K_{m,n}` with `m <= n`,
    /// returning the two parts (smaller first). Requires a connected graph
    /// with at least one vertex in each part.
    pub fn complete_bipartite_parts(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.n < 2 || !self.is_connected() {
            return None;
        }
        let color = self.bipartition()?;
        let (left, right): (Vec<usize>, Vec<usize>) = (0..self.n).partition(|&v| !color[v]);
        if left.is_empty() || right.is_empty() || self.edges.len() != left.len() * right.len() {
            return None;
        }
        if left.len() <= right.len() {
            Some((left, right))
        } else {
            Some((right, left))
        }
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            n: self.n,
            m: self.edges.len(),
            edges: self.edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect(),
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<_> = self.edges.iter().map(|&(u, v)| (u + 1, v + 1)).collect();
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &labels)
            .finish()
    }
}

/// Serializable graph description with 1-based labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
}

fn parse_pair(s: &str, line: usize) -> Result<(usize, usize)> {
    let mut it = s.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it.next().ok_or(Error::Parse {
            line,
            msg: "expected two integers".into(),
        })?;
        tok.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("not a non-negative integer: {tok:?}"),
        })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line,
            msg: "trailing tokens".into(),
        });
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_edge() {
        let g = Graph::parse_edge_list("2 1\n1 2").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn parse_edgeless() {
        let g = Graph::parse_edge_list("3 0").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_k4() {
        let g = Graph::parse_edge_list("4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4").unwrap();
        assert!(g.is_complete());
        assert_eq!(g, Generator::Complete(4).build().unwrap());
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert!(matches!(
            Graph::parse_edge_list("2 1\n1 x"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Graph::parse_edge_list("2 1\n1 3"),
            Err(Error::VertexOutOfRange { vertex: 3, n: 2, line: 2 })
        ));
        assert!(matches!(
            Graph::parse_edge_list("3 2\n1 2\n1 2"),
            Err(Error::DuplicateEdge { u: 1, v: 2, line: 3 })
        ));
        assert!(matches!(
            Graph::parse_edge_list("3 2\n1 2"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(Graph::parse_edge_list("").is_err());
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = Generator::Figure1.build().unwrap();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn recognizes_complete_bipartite() {
        let g = Generator::Bipartite(3, 2).build().unwrap();
        let (a, b) = g.complete_bipartite_parts().unwrap();
        assert_eq!((a.len(), b.len()), (2, 3));
        assert!(Generator::Cycle(5).build().unwrap().complete_bipartite_parts().is_none());
        assert!(Generator::Cycle(6).build().unwrap().complete_bipartite_parts().is_none());
    }
}
