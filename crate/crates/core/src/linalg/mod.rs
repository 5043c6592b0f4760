//! Linear algebra kernels: exact rank over GF(2^31 - 1), packed symmetric
//! matrices and a dense symmetric eigensolver.

mod eigen;
pub mod gf;
mod sym;

pub use eigen::{float_rank, min_eigenvalue_and_vector, sym_eigen, SymEigen};
pub use gf::{gf_rank, PrimeFieldMatrix, PRIME};
pub use sym::SymMatrix;

use nalgebra::{DMatrix, DVector};

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Solves `A x = b` by partial-pivot LU, refusing pivots smaller than
/// `tol · max|A|`.
pub(crate) fn solve(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Option<DVector<f64>> {
    if a.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let lu = a.clone().lu();
    let u = lu.u();
    if (0..u.nrows()).any(|i| u[(i, i)].abs() <= tol * scale) {
        return None;
    }
    lu.solve(b)
}
