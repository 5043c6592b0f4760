//! PSD certificates for the bipartite lower bound.
//!
//! For a `k`-dimensional subspace `W = span{(vᵢ, wᵢ)}` of `ℝᵐ ⊕ ℝⁿ`, find
//! positive diagonal `D_m`, `D_n` with `⟨D_m vᵢ, D_m vⱼ⟩ = ⟨D_n wᵢ, D_n wⱼ⟩`
//! (linear in the squared entries), then an isometry `B: ℝᵐ → ℝⁿ` with
//! `B D_m vᵢ = D_n wᵢ`. With `F = (−B D_m | D_n)` the matrix
//!
//! ```text
//! M = FᵀF = ⎛ D_m²          −D_m Bᵀ D_n ⎞
//!           ⎝ −D_n B D_m     D_n²       ⎠
//! ```
//!
//! is PSD, lies in `L_G` for `G = K_{m,n}` and has `W` in its kernel.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::existence::CertificateMatrix;
use crate::error::{Error, Result};
use crate::graph::{Generator, Graph};
use crate::linalg::{sym_eigen, SymMatrix};
use crate::rng::{stream, Rng};

/// Sweeps of the positive-point search per sampled subspace.
const POSITIVE_SWEEPS: usize = 2000;

#[derive(Debug, Clone, Serialize)]
pub struct BipartiteCertificate {
    pub certificate: CertificateMatrix,
    /// Kernel basis, `(m + n) × k`, first `m` rows are the `vᵢ`.
    #[serde(skip)]
    pub kernel: DMatrix<f64>,
    pub d_m: Vec<f64>,
    pub d_n: Vec<f64>,
    /// Isometry `B`, `n × m`.
    #[serde(skip)]
    pub isometry: DMatrix<f64>,
    /// Subspaces sampled before success.
    pub tries: usize,
}

fn gaussian(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Orthonormal basis of the null space of `a` (columns).
fn null_space(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let ata = SymMatrix::gram(&a.transpose());
    let e = sym_eigen(&ata)?;
    let top = e.values.first().copied().unwrap_or(0.0).abs().max(f64::MIN_POSITIVE);
    let cols: Vec<usize> = (0..e.values.len())
        .filter(|&k| e.values[k].abs() <= 1e-12 * top)
        .collect();
    Ok(DMatrix::from_fn(a.ncols(), cols.len(), |i, j| e.vectors[(i, cols[j])]))
}

/// A point of `span(N)` with every coordinate `>= 1`, by alternating
/// projections between the span and the shifted orthant.
fn positive_point(n: &DMatrix<f64>) -> Option<DVector<f64>> {
    if n.ncols() == 0 {
        return None;
    }
    let mut x = DVector::from_element(n.nrows(), 1.0);
    for _ in 0..POSITIVE_SWEEPS {
        let y = x.map(|t: f64| t.max(1.0));
        x = n * (n.transpose() * y);
        if x.min() >= 1.0 - 1e-9 {
            return Some(x);
        }
    }
    None
}

/// Extends orthonormal columns `q` (`d × k`) to `cols` orthonormal columns.
fn extend_orthonormal(q: &DMatrix<f64>, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    let d = q.nrows();
    let mut basis: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
    while basis.len() < cols {
        let mut v = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut *rng));
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    DMatrix::from_columns(&basis)
}

/// `G^{-1/2}` for symmetric positive definite `g`.
fn inv_sqrt(g: &DMatrix<f64>) -> Result<Option<DMatrix<f64>>> {
    let e = sym_eigen(&SymMatrix::from_dense(g, 1e-9)?)?;
    let top = e.values[0];
    if e.values.iter().any(|&l| l <= 1e-10 * top) {
        return Ok(None);
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        e.values.len(),
        e.values.iter().map(|l| 1.0 / l.sqrt()),
    ));
    Ok(Some(&e.vectors * d * e.vectors.transpose()))
}

/// Builds a certificate that `mlt(K_{m,n}) > k` from a random `k`-dimensional
/// kernel, sampling up to `max_tries` subspaces.
pub fn bipartite_certificate(
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
    max_tries: usize,
) -> Result<BipartiteCertificate> {
    if k == 0 || k > m || m > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= m <= n, got k = {k}, m = {m}, n = {n}"
        )));
    }
    if k * (k + 1) / 2 >= m + n {
        return Err(Error::InvalidParameter(format!(
            "need k(k+1)/2 < m + n, got {} >= {}",
            k * (k + 1) / 2,
            m + n
        )));
    }
    let graph: Graph = Generator::Bipartite(m, n).build()?;
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();

    for attempt in 0..max_tries {
        let mut rng = stream(seed, attempt as u64);
        let v = gaussian(m, k, &mut rng);
        let w = gaussian(n, k, &mut rng);

        let system = DMatrix::from_fn(pairs.len(), m + n, |row, col| {
            let (i, j) = pairs[row];
            if col < m {
                v[(col, i)] * v[(col, j)]
            } else {
                -w[(col - m, i)] * w[(col - m, j)]
            }
        });
        let Some(squares) = positive_point(&null_space(&system)?) else {
            continue;
        };
        let d_m: Vec<f64> = squares.iter().take(m).map(|s| s.sqrt()).collect();
        let d_n: Vec<f64> = squares.iter().skip(m).map(|s| s.sqrt()).collect();
        let dm = DMatrix::from_diagonal(&DVector::from_column_slice(&d_m));
        let dn = DMatrix::from_diagonal(&DVector::from_column_slice(&d_n));

        let x = &dm * &v;
        let y = &dn * &w;
        let Some(root) = inv_sqrt(&(x.transpose() * &x))? else {
            continue;
        };
        let qx = extend_orthonormal(&(&x * &root), m, &mut rng);
        let qy = extend_orthonormal(&(&y * &root), m, &mut rng);
        let b = &qy * qx.transpose();

        let mut f = DMatrix::zeros(n, m + n);
        f.view_mut((0, 0), (n, m)).copy_from(&(-(&b * &dm)));
        f.view_mut((0, m), (n, n)).copy_from(&dn);
        let full = SymMatrix::gram(&f.transpose());
        let Some(certificate) = CertificateMatrix::normalized(&graph, &full) else {
            continue;
        };

        let mut kernel = DMatrix::zeros(m + n, k);
        kernel.view_mut((0, 0), (m, k)).copy_from(&v);
        kernel.view_mut((m, 0), (n, k)).copy_from(&w);
        if !certificate.check(Some(&kernel))?.pass {
            continue;
        }
        return Ok(BipartiteCertificate {
            certificate,
            kernel,
            d_m,
            d_n,
            isometry: b,
            tries: attempt + 1,
        });
    }
    Err(Error::RetriesExhausted { tries: max_tries })
}
