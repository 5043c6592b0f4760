use nalgebra::{DMatrix, DVector};

use super::SymMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = Q diag(values) Qᵀ`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` pairs with `values[k]`.
    pub vectors: DMatrix<f64>,
}

/// Cyclic Jacobi eigensolver.
///
/// Each sweep annihilates every off-diagonal pair `(p, q)` once with a
/// plane rotation; sweeps repeat until the off-diagonal mass is negligible
/// relative to the whole matrix.
pub fn sym_eigen(a: &SymMatrix) -> Result<SymEigen> {
    let n = a.n();
    let mut m = a.to_dense();
    let mut v = DMatrix::<f64>::identity(n, n);
    let total = m.norm();

    let mut converged = n <= 1 || total == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        converged = off <= 1e-15 * total;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

/// Number of eigenvalues with `|λ| > tol · max(1, max |λ|)`.
pub fn float_rank(a: &SymMatrix, tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("rank tolerance must be positive".into()));
    }
    let e = sym_eigen(a)?;
    let top = e.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    Ok(e.values.iter().filter(|x| x.abs() > tol * top).count())
}

/// Smallest eigenvalue and a unit eigenvector for it.
pub fn min_eigenvalue_and_vector(a: &SymMatrix) -> Result<(f64, DVector<f64>)> {
    let n = a.n();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix has no eigenvalues".into()));
    }
    let e = sym_eigen(a)?;
    Ok((e.values[n - 1], e.vectors.column(n - 1).into_owned()))
}
