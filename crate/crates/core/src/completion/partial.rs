use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::SymMatrix;

/// A `G`-partial symmetric matrix: the diagonal and the entries on edges.
///
/// `edge_vals[k]` belongs to `graph.edges()[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GPartialMatrix {
    graph: Graph,
    diag: Vec<f64>,
    edge_vals: Vec<f64>,
}

impl GPartialMatrix {
    pub fn new(graph: Graph, diag: Vec<f64>, edge_vals: Vec<f64>) -> Result<Self> {
        if diag.len() != graph.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} diagonal values for {} vertices",
                diag.len(),
                graph.n()
            )));
        }
        if edge_vals.len() != graph.edge_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} edge values for {} edges",
                edge_vals.len(),
                graph.edge_count()
            )));
        }
        Ok(GPartialMatrix {
            graph,
            diag,
            edge_vals,
        })
    }

    /// The projection `π_G(a)`.
    pub fn project(graph: &Graph, a: &SymMatrix) -> Result<Self> {
        if a.n() != graph.n() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a graph on {} vertices",
                a.n(),
                a.n(),
                graph.n()
            )));
        }
        let diag = (0..a.n()).map(|i| a.get(i, i)).collect();
        let edge_vals = graph.edges().iter().map(|&(i, j)| a.get(i, j)).collect();
        Ok(GPartialMatrix {
            graph: graph.clone(),
            diag,
            edge_vals,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn edge_vals(&self) -> &[f64] {
        &self.edge_vals
    }

    /// Specified entry `(i, j)`, if any.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            Some(self.diag[i])
        } else {
            self.graph.edge_index(i, j).map(|k| self.edge_vals[k])
        }
    }

    /// The completion with every free entry set to zero.
    pub fn zero_fill(&self) -> SymMatrix {
        let mut x = SymMatrix::from_diag(&self.diag);
        for (&(i, j), &v) in self.graph.edges().iter().zip(&self.edge_vals) {
            x.set(i, j, v);
        }
        x
    }

    /// Largest absolute specified entry.
    pub fn scale(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.edge_vals)
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Pairing `⟨M, p⟩ = Σ M_ii p_ii + 2 Σ_edges M_ij p_ij` with a matrix
    /// supported on the diagonal and the edges.
    pub fn pair(&self, m: &SymMatrix) -> f64 {
        let d: f64 = self.diag.iter().enumerate().map(|(i, p)| m.get(i, i) * p).sum();
        let e: f64 = self
            .graph
            .edges()
            .iter()
            .zip(&self.edge_vals)
            .map(|(&(i, j), p)| 2.0 * m.get(i, j) * p)
            .sum();
        d + e
    }

    /// Restriction to the subgraph induced on `vertices` (in that order).
    pub fn restrict(&self, vertices: &[usize]) -> GPartialMatrix {
        let graph = self.graph.induced(vertices);
        let diag = vertices.iter().map(|&v| self.diag[v]).collect();
        let edge_vals = graph
            .edges()
            .iter()
            .map(|&(a, b)| self.get(vertices[a], vertices[b]).expect("induced edge"))
            .collect();
        GPartialMatrix {
            graph,
            diag,
            edge_vals,
        }
    }

    pub fn to_json(&self) -> PartialMatrixJson {
        PartialMatrixJson {
            n: self.n(),
            diag: self.diag.clone(),
            edges: self
                .graph
                .edges()
                .iter()
                .zip(&self.edge_vals)
                .map(|(&(u, v), &val)| EdgeValue {
                    u: u + 1,
                    v: v + 1,
                    val,
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &PartialMatrixJson) -> Result<Self> {
        if doc.n == 0 {
            return Err(Error::PatternMismatch("n must be at least 1".into()));
        }
        if doc.diag.len() != doc.n {
            return Err(Error::PatternMismatch(format!(
                "diag has {} entries, n = {}",
                doc.diag.len(),
                doc.n
            )));
        }
        for e in &doc.edges {
            if e.u == 0 || e.v == 0 || e.u > doc.n || e.v > doc.n || e.u == e.v {
                return Err(Error::PatternMismatch(format!(
                    "edge {{{},{}}} is not a pair of distinct vertices in 1..={}",
                    e.u, e.v, doc.n
                )));
            }
        }
        let graph = Graph::from_edges(doc.n, doc.edges.iter().map(|e| (e.u - 1, e.v - 1)))
            .map_err(|e| Error::PatternMismatch(e.to_string()))?;
        let mut edge_vals = vec![0.0; graph.edge_count()];
        for e in &doc.edges {
            let k = graph.edge_index(e.u - 1, e.v - 1).expect("edge just inserted");
            edge_vals[k] = e.val;
        }
        GPartialMatrix::new(graph, doc.diag.clone(), edge_vals)
    }
}

/// JSON layout `{ "n": int, "diag": [reals], "edges": [{"u", "v", "val"}] }`
/// with 1-based vertex labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialMatrixJson {
    pub n: usize,
    pub diag: Vec<f64>,
    pub edges: Vec<EdgeValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeValue {
    pub u: usize,
    pub v: usize,
    pub val: f64,
}

impl Serialize for GPartialMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GPartialMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PartialMatrixJson::deserialize(d)?;
        GPartialMatrix::from_json(&doc).map_err(serde::de::Error::custom)
    }
}
