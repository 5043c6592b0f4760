use std::fmt;
use std::str::FromStr;

use super::Graph;
use crate::error::{Error, Result};

/// Named graph families, parsed from tokens such as `bipartite:5:5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Complete(usize),
    /// `K_{m,n}` with part one `1..=m` and part two `m+1..=m+n`.
    Bipartite(usize, usize),
    Cycle(usize),
    Path(usize),
    /// Cycle on `1..k-1` plus apex `k` joined to every cycle vertex.
    Wheel(usize),
    /// `K_4` with every edge subdivided once (10 vertices, 12 edges).
    Figure1,
}

/// Edges of the subdivided `K_4`. Branch vertices are 1, 3, 7 and 10.
const FIGURE1_EDGES: [(usize, usize); 12] = [
    (1, 2),
    (2, 3),
    (3, 8),
    (8, 10),
    (10, 6),
    (6, 1),
    (1, 4),
    (4, 7),
    (7, 9),
    (9, 10),
    (3, 5),
    (5, 7),
];

impl Generator {
    pub fn build(self) -> Result<Graph> {
        match self {
            Generator::Complete(n) => {
                positive("complete", n)?;
                let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
                Graph::from_edges(n, edges)
            }
            Generator::Bipartite(m, n) => {
                positive("bipartite", m)?;
                positive("bipartite", n)?;
                let edges = (0..m).flat_map(|i| (m..m + n).map(move |j| (i, j)));
                Graph::from_edges(m + n, edges)
            }
            Generator::Cycle(n) => {
                if n < 3 {
                    return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
                }
                Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
            }
            Generator::Path(n) => {
                positive("path", n)?;
                Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
            }
            Generator::Wheel(k) => {
                if k < 4 {
                    return Err(Error::InvalidParameter(format!("wheel needs k >= 4, got {k}")));
                }
                let rim = k - 1;
                let edges = (0..rim)
                    .map(|i| (i, (i + 1) % rim))
                    .chain((0..rim).map(|i| (i, rim)));
                Graph::from_edges(k, edges)
            }
            Generator::Figure1 => {
                Graph::from_edges(10, FIGURE1_EDGES.iter().map(|&(u, v)| (u - 1, v - 1)))
            }
        }
    }
}

fn positive(name: &str, x: usize) -> Result<()> {
    if x == 0 {
        Err(Error::InvalidParameter(format!("{name} size must be >= 1")))
    } else {
        Ok(())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidParameter(format!("generator {s:?} is missing a size")))?
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad size in generator {s:?}")))
        };
        let arity = |k: usize| -> Result<()> {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "generator {:?} takes {k} size parameter(s)",
                    parts[0]
                )))
            }
        };
        let g = match parts[0] {
            "complete" => {
                arity(1)?;
                Generator::Complete(num(1)?)
            }
            "bipartite" => {
                arity(2)?;
                Generator::Bipartite(num(1)?, num(2)?)
            }
            "cycle" => {
                arity(1)?;
                Generator::Cycle(num(1)?)
            }
            "path" => {
                arity(1)?;
                Generator::Path(num(1)?)
            }
            "wheel" => {
                arity(1)?;
                Generator::Wheel(num(1)?)
            }
            "figure1" => {
                arity(0)?;
                Generator::Figure1
            }
            other => {
                return Err(Error::InvalidParameter(format!("unknown generator {other:?}")));
            }
        };
        Ok(g)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::Complete(n) => write!(f, "complete:{n}"),
            Generator::Bipartite(m, n) => write!(f, "bipartite:{m}:{n}"),
            Generator::Cycle(n) => write!(f, "cycle:{n}"),
            Generator::Path(n) => write!(f, "path:{n}"),
            Generator::Wheel(k) => write!(f, "wheel:{k}"),
            Generator::Figure1 => write!(f, "figure1"),
        }
    }
}
