use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::existence::{pd_completion_exists, ExistenceOptions, ExistenceStatus};
use crate::completion::GPartialMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::SymMatrix;
use crate::rng::{stream, Rng};

/// `π_G(UUᵀ)` for `U` an `n × r` standard Gaussian matrix drawn from `rng`.
pub fn wishart_partial_with(g: &Graph, r: usize, rng: &mut Rng) -> Result<GPartialMatrix> {
    if r == 0 || r > g.n() {
        return Err(Error::InvalidParameter(format!(
            "Wishart rank {r} for {} vertices",
            g.n()
        )));
    }
    let u = DMatrix::from_fn(g.n(), r, |_, _| StandardNormal.sample(&mut *rng));
    GPartialMatrix::project(g, &SymMatrix::gram(&u))
}

/// Seeded Wishart partial matrix; the same `(seed, r)` always gives the
/// same sample.
pub fn wishart_partial(g: &Graph, r: usize, seed: u64) -> Result<GPartialMatrix> {
    wishart_partial_with(g, r, &mut stream(seed, trial_stream(r, 0)))
}

fn trial_stream(r: usize, trial: usize) -> u64 {
    ((r as u64) << 32) | trial as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankFrequency {
    pub r: usize,
    pub trials: usize,
    pub exists: usize,
    pub not_exists: usize,
    pub undetermined: usize,
    /// `exists / trials`.
    pub frequency: f64,
}

/// Existence counts over `trials` Wishart samples of rank `r`.
pub fn existence_frequency(
    g: &Graph,
    r: usize,
    trials: usize,
    seed: u64,
    opts: &ExistenceOptions,
) -> Result<RankFrequency> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let statuses: Vec<ExistenceStatus> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = wishart_partial_with(g, r, &mut stream(seed, trial_stream(r, t)))?;
            Ok(pd_completion_exists(&p, opts)?.status)
        })
        .collect::<Result<_>>()?;
    let count = |s| statuses.iter().filter(|&&x| x == s).count();
    let exists = count(ExistenceStatus::Exists);
    Ok(RankFrequency {
        r,
        trials,
        exists,
        not_exists: count(ExistenceStatus::NotExists),
        undetermined: count(ExistenceStatus::Undetermined),
        frequency: exists as f64 / trials as f64,
    })
}

/// Empirical existence rates for every rank. The estimate is the smallest
/// rank where all trials report `Exists`; it is an estimate, not a proof.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub seed: u64,
    pub frequencies: Vec<RankFrequency>,
    pub estimate: Option<usize>,
    /// Ranks whose frequency is below that of a smaller rank.
    pub inversions: Vec<usize>,
}

pub fn mlt_monte_carlo(
    g: &Graph,
    trials: usize,
    seed: u64,
    opts: &ExistenceOptions,
) -> Result<MonteCarloReport> {
    let frequencies = (1..=g.n())
        .map(|r| existence_frequency(g, r, trials, seed, opts))
        .collect::<Result<Vec<_>>>()?;
    let estimate = frequencies
        .iter()
        .find(|f| f.exists == f.trials)
        .map(|f| f.r);
    let mut inversions = Vec::new();
    let mut best = 0;
    for f in &frequencies {
        if f.exists < best {
            inversions.push(f.r);
        }
        best = best.max(f.exists);
    }
    Ok(MonteCarloReport {
        trials,
        seed,
        frequencies,
        estimate,
        inversions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Generator;

    #[test]
    fn wishart_is_deterministic_and_nonnegative_on_diagonal() {
        let g = Generator::Bipartite(3, 4).build().unwrap();
        let a = wishart_partial(&g, 2, 5).unwrap();
        let b = wishart_partial(&g, 2, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.diag().iter().all(|&d| d >= 0.0));
        assert_ne!(a, wishart_partial(&g, 2, 6).unwrap());
        assert!(wishart_partial(&g, 0, 0).is_err());
        assert!(wishart_partial(&g, 8, 0).is_err());
    }

    #[test]
    fn full_rank_samples_are_completable() {
        let g = Generator::Cycle(6).build().unwrap();
        let f = existence_frequency(&g, 6, 10, 0, &ExistenceOptions::default()).unwrap();
        assert_eq!(f.exists, 10);
    }

    #[test]
    fn path_estimate_is_two() {
        let g = Generator::Path(4).build().unwrap();
        let rep = mlt_monte_carlo(&g, 20, 0, &ExistenceOptions::default()).unwrap();
        assert_eq!(rep.estimate, Some(2));
        assert_eq!(rep.frequencies[0].exists, 0);
        assert!(rep.inversions.is_empty());
    }

    #[test]
    fn complete_graph_needs_full_rank() {
        let g = Generator::Complete(4).build().unwrap();
        let rep = mlt_monte_carlo(&g, 10, 0, &ExistenceOptions::default()).unwrap();
        assert_eq!(rep.estimate, Some(4));
        assert!(rep.frequencies[..3].iter().all(|f| f.frequency < 1.0));
    }
}
