//! Generic completion rank and maximum likelihood threshold of graphs.
//!
//! The generic completion rank (gcr) of a graph `G` is the smallest `r` such
//! that a generic `G`-partial symmetric matrix (diagonal plus the entries on
//! edges) has a rank-`r` completion. The maximum likelihood threshold (mlt)
//! is the smallest `r` such that almost every rank-`r` positive semidefinite
//! matrix projects to a `G`-partial matrix with a positive definite
//! completion. The crate computes both: closed forms for complete bipartite
//! graphs, clique-sum recursion, randomized Terracini rank tests over
//! GF(2^31 - 1), constructive completions and PSD certificates.

pub mod cli;
pub mod completion;
pub mod error;
pub mod gcr;
pub mod graph;
pub mod linalg;
pub mod mlt;
pub mod rng;

pub use error::{Error, Result};
