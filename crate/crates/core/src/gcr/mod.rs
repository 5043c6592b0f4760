//! Generic completion rank.
//!
//! Dominance of the projection from rank-`r` matrices onto `G`-partial
//! matrices is decided by the rank of its differential at a random point
//! `M = U Uᵀ`: the Terracini matrix of `X ↦ π_G(U Xᵀ + X Uᵀ)`. A single
//! full-rank evaluation proves dominance; rank-deficient evaluations only
//! make non-dominance likely, with per-trial error at most `(n + |E|) / p`.

mod dispatch;

pub use dispatch::{gcr_dispatch, AtomGcr, GcrBounds, GcrMethod, GcrReport, GcrValue};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::gf::{self, PrimeFieldMatrix, PRIME};
use crate::linalg::gf_rank;
use crate::rng;

/// Default number of independent random points per dominance test.
pub const DEFAULT_TRIALS: usize = 5;

/// A point `U Uᵀ` on the variety of rank-`r` matrices, given by its `n × r`
/// factor over GF(p). Row `i` belongs to vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPoint {
    u: PrimeFieldMatrix,
}

impl RankPoint {
    pub fn new(u: PrimeFieldMatrix) -> Self {
        RankPoint { u }
    }

    /// Uniform random factor, resampled until it has full column rank.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Self {
        loop {
            let u = PrimeFieldMatrix::random(n, r, rng);
            if r > n || gf_rank(&u) == r {
                return RankPoint { u };
            }
        }
    }

    pub fn factor(&self) -> &PrimeFieldMatrix {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }
}

/// Jacobian of `X ↦ π_G(U Xᵀ + X Uᵀ)` at `U`.
///
/// Columns index the entries of `X` row by row (`X[i][c]` is column
/// `i·r + c`). Rows are the diagonal coordinates `1..n` followed by the
/// edges in lexicographic order. Row `(i, i)` holds `2·U[i]` in block `i`;
/// row `{i, j}` holds `U[j]` in block `i` and `U[i]` in block `j`.
pub fn terracini_matrix(g: &Graph, point: &RankPoint) -> Result<PrimeFieldMatrix> {
    let n = g.n();
    if point.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "rank point has {} rows, graph has {} vertices",
            point.n(),
            n
        )));
    }
    let r = point.rank();
    let u = &point.u;
    let mut t = PrimeFieldMatrix::zeros(n + g.edge_count(), n * r);
    for i in 0..n {
        for c in 0..r {
            t.set(i, i * r + c, gf::add(u.get(i, c), u.get(i, c)));
        }
    }
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        let row = n + e;
        for c in 0..r {
            t.set(row, i * r + c, u.get(j, c));
            t.set(row, j * r + c, u.get(i, c));
        }
    }
    Ok(t)
}

/// Per-trial probability bound that a dominant projection looks
/// non-dominant at a uniform random point.
pub fn per_trial_failure_bound(g: &Graph) -> f64 {
    (g.n() + g.edge_count()) as f64 / PRIME as f64
}

fn trial_stream(r: usize, trial: usize) -> u64 {
    ((r as u64) << 32) | trial as u64
}

/// Randomized dominance test: true iff some trial's Terracini matrix has
/// full row rank `n + |E|`.
pub fn is_dominant(g: &Graph, r: usize, trials: usize, seed: u64) -> bool {
    let n = g.n();
    if r == 0 {
        return n == 0;
    }
    let target = n + g.edge_count();
    if r * n < target {
        return false;
    }
    (0..trials.max(1)).into_par_iter().any(|trial| {
        let mut rng = rng::stream(seed, trial_stream(r, trial));
        let point = RankPoint::random(n, r, &mut rng);
        let t = terracini_matrix(g, &point).expect("point built for this graph");
        gf_rank(&t) == target
    })
}

/// Smallest `r` whose rank-`r` projection tests dominant, scanning upward
/// from the edge-count lower bound.
pub fn gcr_randomized(g: &Graph, trials: usize, seed: u64) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    (edge_lower_bound(g).max(1)..=n)
        .find(|&r| is_dominant(g, r, trials, seed))
        .unwrap_or(n)
}

/// Smallest `r >= 1` with `|E| <= n(r-1) - r(r-1)/2`; a lower bound on the
/// generic completion rank from counting dimensions.
pub fn edge_lower_bound(g: &Graph) -> usize {
    let n = g.n() as i64;
    let e = g.edge_count() as i64;
    let mut r: i64 = 1;
    while e > n * (r - 1) - r * (r - 1) / 2 {
        r += 1;
    }
    r as usize
}

fn binom2(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Generic completion rank of `K_{m,n}`, `2 <= m <= n`: `m` when
/// `n <= m(m-1)/2`, otherwise `m + 1`.
pub fn gcr_bipartite(m: usize, n: usize) -> Result<usize> {
    if m < 2 || n < m {
        return Err(Error::InvalidParameter(format!(
            "gcr_bipartite needs 2 <= m <= n, got m={m}, n={n}"
        )));
    }
    Ok(if n <= binom2(m) { m } else { m + 1 })
}

/// The explicit rank-`m` witness for `K_{m, m(m-1)/2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankmWitness {
    /// `n × m` 0/1 matrix; row `k` is `e_i + e_j` for the `k`-th pair.
    pub a: PrimeFieldMatrix,
    /// Coefficient matrix with entry `((i, j), k) = a[k][i] · a[k][j]`.
    pub c: PrimeFieldMatrix,
}

/// Builds the witness from pairs `i < j` in lexicographic order.
pub fn rankm_witness(m: usize) -> Result<RankmWitness> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("rankm_witness needs m >= 2, got {m}")));
    }
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let n = pairs.len();
    let a = PrimeFieldMatrix::from_fn(n, m, |k, col| {
        let (i, j) = pairs[k];
        u64::from(col == i || col == j)
    });
    let c = PrimeFieldMatrix::from_fn(n, n, |row, k| {
        let (i, j) = pairs[row];
        gf::mul(a.get(k, i), a.get(k, j))
    });
    Ok(RankmWitness { a, c })
}

/// Non-symmetric generic completion rank of the partial `m × n` matrix
/// whose known entries are the edges of `g`, with rows `0..m` and columns
/// `m..m+n` of `g`.
///
/// Rank-`r` completions `U Vᵀ` are dominant iff the Jacobian of
/// `(X, Y) ↦ (U Xᵀ + Y Vᵀ)_{ij}` over the known entries has rank `|E|` at a
/// random point.
pub fn nonsym_gcr(g: &Graph, m: usize, trials: usize, seed: u64) -> Result<usize> {
    let total = g.n();
    if m > total {
        return Err(Error::PatternMismatch(format!("part one has {m} vertices, graph has {total}")));
    }
    let n = total - m;
    if let Some(&(i, j)) = g.edges().iter().find(|&&(i, j)| !(i < m && j >= m)) {
        return Err(Error::PatternMismatch(format!(
            "edge {{{},{}}} does not join the two parts",
            i + 1,
            j + 1
        )));
    }
    let e = g.edge_count();
    if e == 0 {
        return Ok(0);
    }
    for r in 1..=m.min(n) {
        if r * (m + n) < e {
            continue;
        }
        let dominant = (0..trials.max(1)).into_par_iter().any(|trial| {
            let mut rng = rng::stream(seed, trial_stream(r, trial) | (1 << 63));
            let u = PrimeFieldMatrix::random(m, r, &mut rng);
            let v = PrimeFieldMatrix::random(n, r, &mut rng);
            let mut jac = PrimeFieldMatrix::zeros(e, r * (m + n));
            for (row, &(i, j)) in g.edges().iter().enumerate() {
                let col = j - m;
                for c in 0..r {
                    // d/dY[i][c] = V[col][c], d/dX[col][c] = U[i][c]
                    jac.set(row, i * r + c, v.get(col, c));
                    jac.set(row, m * r + col * r + c, u.get(i, c));
                }
            }
            gf_rank(&jac) == e
        });
        if dominant {
            return Ok(r);
        }
    }
    Ok(m.min(n))
}
