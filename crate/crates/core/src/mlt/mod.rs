//! Maximum likelihood threshold: closed forms, bounds, existence decisions
//! and certificates.

mod certificate;
mod existence;
mod monte_carlo;

pub use certificate::{bipartite_certificate, BipartiteCertificate};
pub use existence::{
    boundary_certificate_search, pd_completion_exists, CertificateCheck, CertificateMatrix,
    ExistenceOptions, ExistenceStatus, ExistenceVerdict,
};
pub use monte_carlo::{
    existence_frequency, mlt_monte_carlo, wishart_partial, wishart_partial_with,
    MonteCarloReport, RankFrequency,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gcr::{gcr_bipartite, gcr_randomized, DEFAULT_TRIALS};
use crate::graph::{
    clique_number, clique_separator_decomposition, is_chordal, treewidth_at_most_2,
    treewidth_upper_bound, Graph,
};

fn check_bipartite_range(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < m {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

fn choose2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// `mlt(K_{m,n}) = min(k*, m + 1)` where `k*` is the smallest `k` with
/// `k(k+1)/2 >= m + n`.
pub fn mlt_bipartite(m: usize, n: usize) -> Result<usize> {
    check_bipartite_range(m, n)?;
    let k = (1..).find(|&k| k * (k + 1) / 2 >= m + n).expect("unbounded search");
    Ok(k.min(m + 1))
}

/// `(ω, τ + 1)`, the upper end capped by `gcr` when supplied.
pub fn buhl_bounds(g: &Graph, gcr: Option<usize>) -> (usize, usize) {
    let lo = clique_number(g);
    let hi = treewidth_upper_bound(g) + 1;
    (lo, gcr.map_or(hi, |r| hi.min(r)))
}

/// Sparsity order of `K_{m,n}`: `n` while `n <= C(m,2) + 1`, else `C(m,2) + 1`.
pub fn sparsity_order_bipartite(m: usize, n: usize) -> Result<usize> {
    check_bipartite_range(m, n)?;
    let cap = choose2(m) + 1;
    Ok(if n <= cap { n } else { cap })
}

/// `gcr + order <= m + n + 1`, with equality only at `n = C(m,2) + 1`.
pub fn check_order_inequality(m: usize, n: usize) -> Result<bool> {
    let sum = gcr_bipartite(m, n)? + sparsity_order_bipartite(m, n)?;
    let bound = m + n + 1;
    Ok(sum <= bound && (sum < bound || n == choose2(m) + 1))
}

/// Where a bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    CliqueNumber,
    TreewidthPlusOne,
    Gcr,
    ClosedForm,
    CliqueSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub value: usize,
    pub source: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomMlt {
    /// 1-based vertex labels.
    pub vertices: Vec<usize>,
    pub lower: Bound,
    pub upper: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MltOptions {
    /// Trials for randomized gcr tests; 0 skips them.
    pub gcr_trials: usize,
    /// Monte Carlo trials per rank; 0 skips the simulation.
    pub mc_trials: usize,
    pub seed: u64,
    pub existence: ExistenceOptions,
}

impl Default for MltOptions {
    fn default() -> Self {
        MltOptions {
            gcr_trials: DEFAULT_TRIALS,
            mc_trials: 0,
            seed: 0,
            existence: ExistenceOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MltReport {
    pub n: usize,
    pub m: usize,
    pub lower: Bound,
    pub upper: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<usize>,
    pub seed: u64,
    pub atoms: Vec<AtomMlt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloReport>,
}

fn exact_atom(vertices: Vec<usize>, v: usize, lower: Provenance, upper: Provenance) -> AtomMlt {
    AtomMlt {
        vertices,
        lower: Bound { value: v, source: lower },
        upper: Bound { value: v, source: upper },
        exact: Some(v),
    }
}

fn atom_mlt(atom: &Graph, labels: Vec<usize>, opts: &MltOptions) -> AtomMlt {
    use Provenance::*;
    if atom.is_complete() {
        return exact_atom(labels, atom.n(), ClosedForm, ClosedForm);
    }
    if let Some((a, b)) = atom.complete_bipartite_parts() {
        if a.len() >= 2 {
            let v = mlt_bipartite(a.len(), b.len()).expect("parts satisfy 2 <= m <= n");
            return exact_atom(labels, v, ClosedForm, ClosedForm);
        }
    }
    if is_chordal(atom).is_some() {
        return exact_atom(labels, clique_number(atom), CliqueNumber, TreewidthPlusOne);
    }
    let gcr = (opts.gcr_trials > 0).then(|| gcr_randomized(atom, opts.gcr_trials, opts.seed));
    if let (true, Some(r)) = (treewidth_at_most_2(atom), gcr) {
        return exact_atom(labels, r, Gcr, Gcr);
    }
    let (lo, hi) = buhl_bounds(atom, gcr);
    let upper_source = if gcr == Some(hi) { Gcr } else { TreewidthPlusOne };
    AtomMlt {
        vertices: labels,
        lower: Bound { value: lo, source: CliqueNumber },
        upper: Bound { value: hi, source: upper_source },
        exact: (lo == hi).then_some(lo),
    }
}

/// Decomposes along clique separators, evaluates each atom and combines by
/// maximum; attaches a Monte Carlo estimate when requested and the value
/// is not already exact.
pub fn mlt_dispatch(g: &Graph, opts: &MltOptions) -> Result<MltReport> {
    let tree = clique_separator_decomposition(g);
    let atoms: Vec<AtomMlt> = tree
        .atoms
        .iter()
        .enumerate()
        .map(|(i, verts)| {
            let atom = tree.atom_graph(g, i);
            atom_mlt(&atom, verts.iter().map(|&v| v + 1).collect(), opts)
        })
        .collect();

    let pick = |f: fn(&AtomMlt) -> Bound| {
        atoms
            .iter()
            .map(f)
            .max_by_key(|b| b.value)
            .unwrap_or(Bound { value: 0, source: Provenance::ClosedForm })
    };
    let mut lower = pick(|a| a.lower);
    let mut upper = pick(|a| a.upper);
    if atoms.len() > 1 {
        upper.source = Provenance::CliqueSum;
        if lower.value == upper.value {
            lower.source = Provenance::CliqueSum;
        }
    }
    let exact = atoms
        .iter()
        .all(|a| a.exact.is_some())
        .then_some(upper.value);

    let monte_carlo = if opts.mc_trials > 0 && exact.is_none() && g.n() > 0 {
        Some(mlt_monte_carlo(g, opts.mc_trials, opts.seed, &opts.existence)?)
    } else {
        None
    };

    Ok(MltReport {
        n: g.n(),
        m: g.edge_count(),
        lower,
        upper,
        exact,
        seed: opts.seed,
        atoms,
        monte_carlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Generator;

    #[test]
    fn bipartite_closed_form() {
        assert_eq!(mlt_bipartite(5, 5).unwrap(), 4);
        assert_eq!(mlt_bipartite(2, 2).unwrap(), 3);
        assert_eq!(mlt_bipartite(3, 3).unwrap(), 3);
        assert_eq!(mlt_bipartite(3, 4).unwrap(), 4);
        assert!(mlt_bipartite(1, 3).is_err());
        assert!(mlt_bipartite(4, 3).is_err());
    }

    #[test]
    fn bipartite_equals_gcr_for_small_m_and_large_n() {
        for m in 2..=4 {
            for n in m..=20 {
                assert_eq!(mlt_bipartite(m, n).unwrap(), gcr_bipartite(m, n).unwrap(), "({m},{n})");
            }
        }
        for m in 5..=9 {
            for n in choose2(m) + 1..choose2(m) + 6 {
                assert_eq!(mlt_bipartite(m, n).unwrap(), gcr_bipartite(m, n).unwrap(), "({m},{n})");
            }
        }
    }

    #[test]
    fn buhl_examples() {
        assert_eq!(buhl_bounds(&Generator::Complete(4).build().unwrap(), None), (4, 4));
        assert_eq!(buhl_bounds(&Generator::Cycle(5).build().unwrap(), None), (2, 3));
        let k55 = Generator::Bipartite(5, 5).build().unwrap();
        assert_eq!(buhl_bounds(&k55, None), (2, 6));
        assert_eq!(buhl_bounds(&k55, Some(5)), (2, 5));
    }

    #[test]
    fn sparsity_order_examples() {
        assert_eq!(sparsity_order_bipartite(3, 4).unwrap(), 4);
        assert_eq!(sparsity_order_bipartite(5, 5).unwrap(), 5);
        assert_eq!(sparsity_order_bipartite(2, 2).unwrap(), 2);
        assert_eq!(sparsity_order_bipartite(3, 9).unwrap(), 4);
        for m in 2..=7 {
            for n in m..=30 {
                assert!(check_order_inequality(m, n).unwrap(), "({m},{n})");
            }
        }
    }

    #[test]
    fn dispatch_examples() {
        let opts = MltOptions::default();
        let k55 = mlt_dispatch(&Generator::Bipartite(5, 5).build().unwrap(), &opts).unwrap();
        assert_eq!(k55.exact, Some(4));

        let path = mlt_dispatch(&Generator::Path(5).build().unwrap(), &opts).unwrap();
        assert_eq!(path.exact, Some(2));

        let c6 = mlt_dispatch(&Generator::Cycle(6).build().unwrap(), &opts).unwrap();
        assert_eq!(c6.exact, Some(3));
        assert_eq!(c6.upper.source, Provenance::Gcr);

        // K4 and K_{3,4} sharing one vertex.
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((i, j));
            }
        }
        for a in [3, 4, 5] {
            for b in 6..10 {
                edges.push((a, b));
            }
        }
        let g = Graph::from_edges(10, edges).unwrap();
        let r = mlt_dispatch(&g, &opts).unwrap();
        assert_eq!(r.exact, Some(4));
        assert_eq!(r.upper.source, Provenance::CliqueSum);
    }

    #[test]
    fn wheel_without_trials_reports_bounds() {
        let opts = MltOptions {
            gcr_trials: 0,
            ..MltOptions::default()
        };
        let r = mlt_dispatch(&Generator::Wheel(7).build().unwrap(), &opts).unwrap();
        assert!(r.lower.value <= r.upper.value);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["lower"]["source"], "clique-number");
    }
}
