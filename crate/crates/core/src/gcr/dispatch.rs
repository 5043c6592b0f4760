use serde::{Serialize, Serializer};

use super::{edge_lower_bound, gcr_bipartite, gcr_randomized, per_trial_failure_bound};
use crate::graph::{
    clique_number, clique_separator_decomposition, is_chordal, treewidth_upper_bound, Graph,
};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GcrMethod {
    ClosedForm,
    CliqueSum,
    Randomized,
    BoundOnly,
}

/// An exact value or an interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcrValue {
    Exact(usize),
    Interval { lo: usize, hi: usize },
}

impl GcrValue {
    pub fn lo(&self) -> usize {
        match *self {
            GcrValue::Exact(v) => v,
            GcrValue::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> usize {
        match *self {
            GcrValue::Exact(v) => v,
            GcrValue::Interval { hi, .. } => hi,
        }
    }

    pub fn exact(&self) -> Option<usize> {
        match *self {
            GcrValue::Exact(v) => Some(v),
            GcrValue::Interval { .. } => None,
        }
    }

    fn max(self, other: GcrValue) -> GcrValue {
        let (lo, hi) = (self.lo().max(other.lo()), self.hi().max(other.hi()));
        if lo == hi {
            GcrValue::Exact(lo)
        } else {
            GcrValue::Interval { lo, hi }
        }
    }
}

/// Bounds attached to every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GcrBounds {
    /// Edge-count lower bound.
    pub edge: usize,
    /// Clique number; the rank is at least the threshold, which is at
    /// least ω.
    pub clique: usize,
    /// Treewidth heuristic plus one, an upper bound.
    pub treewidth_plus_1: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomGcr {
    /// 1-based vertex labels of the atom.
    pub vertices: Vec<usize>,
    #[serde(flatten)]
    pub value: GcrValue,
    pub method: GcrMethod,
}

/// Generic completion rank of a graph with provenance.
///
/// A randomized `true` dominance verdict is a proof; only the minimality
/// of the reported value (the `false` verdicts below it) is probabilistic,
/// with failure probability at most `per_trial_failure_bound^trials` per
/// rejected rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcrReport {
    pub n: usize,
    pub m: usize,
    #[serde(flatten)]
    pub value: GcrValue,
    pub method: GcrMethod,
    pub bounds: GcrBounds,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_trial_failure_bound: Option<f64>,
    pub atoms: Vec<AtomGcr>,
}

impl Serialize for GcrValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(1))?;
        match *self {
            GcrValue::Exact(v) => map.serialize_entry("value", &v)?,
            GcrValue::Interval { lo, hi } => map.serialize_entry("interval", &[lo, hi])?,
        }
        map.end()
    }
}

/// Value for a single atom: closed forms when the atom is recognized,
/// otherwise the randomized search (or bounds when `trials == 0`).
fn atom_gcr(atom: &Graph, trials: usize, seed: u64) -> (GcrValue, GcrMethod) {
    if atom.is_complete() {
        return (GcrValue::Exact(atom.n()), GcrMethod::ClosedForm);
    }
    if let Some((a, b)) = atom.complete_bipartite_parts() {
        if a.len() >= 2 {
            let v = gcr_bipartite(a.len(), b.len()).expect("parts satisfy 2 <= m <= n");
            return (GcrValue::Exact(v), GcrMethod::ClosedForm);
        }
    }
    if is_chordal(atom).is_some() {
        return (GcrValue::Exact(clique_number(atom)), GcrMethod::ClosedForm);
    }
    if trials == 0 {
        let lo = edge_lower_bound(atom).max(clique_number(atom));
        let hi = treewidth_upper_bound(atom) + 1;
        let value = if lo >= hi {
            GcrValue::Exact(hi)
        } else {
            GcrValue::Interval { lo, hi }
        };
        return (value, GcrMethod::BoundOnly);
    }
    (GcrValue::Exact(gcr_randomized(atom, trials, seed)), GcrMethod::Randomized)
}

/// Decomposes along clique separators, evaluates each atom and combines
/// by maximum. `trials == 0` skips randomized tests and reports bounds.
pub fn gcr_dispatch(g: &Graph, trials: usize, seed: u64) -> GcrReport {
    let tree = clique_separator_decomposition(g);
    let mut value: Option<GcrValue> = None;
    let mut atoms = Vec::with_capacity(tree.atoms.len());
    let mut any_random = false;
    let mut any_bound = false;
    let mut failure_bound: f64 = 0.0;

    for (i, verts) in tree.atoms.iter().enumerate() {
        let atom = tree.atom_graph(g, i);
        let (v, method) = atom_gcr(&atom, trials, seed);
        match method {
            GcrMethod::Randomized => {
                any_random = true;
                failure_bound = failure_bound.max(per_trial_failure_bound(&atom));
            }
            GcrMethod::BoundOnly => any_bound = true,
            _ => {}
        }
        value = Some(match value {
            None => v,
            Some(acc) => acc.max(v),
        });
        atoms.push(AtomGcr {
            vertices: verts.iter().map(|&x| x + 1).collect(),
            value: v,
            method,
        });
    }

    let method = if any_bound {
        GcrMethod::BoundOnly
    } else if atoms.len() > 1 {
        GcrMethod::CliqueSum
    } else if any_random {
        GcrMethod::Randomized
    } else {
        GcrMethod::ClosedForm
    };

    GcrReport {
        n: g.n(),
        m: g.edge_count(),
        value: value.unwrap_or(GcrValue::Exact(0)),
        method,
        bounds: GcrBounds {
            edge: edge_lower_bound(g),
            clique: clique_number(g),
            treewidth_plus_1: treewidth_upper_bound(g) + 1,
        },
        trials,
        seed,
        per_trial_failure_bound: any_random.then_some(failure_bound),
        atoms,
    }
}
