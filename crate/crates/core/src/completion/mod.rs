//! Constructive low-rank completions of partial symmetric matrices.

mod clique_sum;
mod one_entry;
mod partial;

pub use clique_sum::{clique_sum_complete, clique_sum_complete_from};
pub use one_entry::{
    one_entry_case_a, one_entry_case_b, one_entry_case_c, BorderedMatrix, CornerRoots,
};
pub use partial::{EdgeValue, GPartialMatrix, PartialMatrixJson};

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{float_rank, solve, SymMatrix, DEFAULT_RANK_TOL};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionOptions {
    /// Relative tolerance for rank decisions and data agreement.
    pub tol: f64,
    /// Redraws allowed for random choices that land on a bad value.
    pub max_retries: usize,
    pub seed: u64,
    /// Sweep cap for the alternating least-squares fit.
    pub als_max_iter: usize,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions {
            tol: DEFAULT_RANK_TOL,
            max_retries: 20,
            seed: 0,
            als_max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionReport {
    pub pass: bool,
    /// Largest `|x_ij − p_ij|` over specified entries.
    pub max_residual: f64,
    pub rank: usize,
    pub rank_target: usize,
}

/// Checks that `x` agrees with `p` on the pattern (to `tol · max(1, |p|∞)`)
/// and has rank at most `rank_target`.
pub fn verify_completion(
    p: &GPartialMatrix,
    x: &SymMatrix,
    rank_target: usize,
    tol: f64,
) -> Result<CompletionReport> {
    if x.n() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "completion is {}x{}, pattern has {} vertices",
            x.n(),
            x.n(),
            p.n()
        )));
    }
    let diag = p.diag().iter().enumerate().map(|(i, v)| (x.get(i, i) - v).abs());
    let edges = p
        .graph()
        .edges()
        .iter()
        .zip(p.edge_vals())
        .map(|(&(i, j), v)| (x.get(i, j) - v).abs());
    let max_residual = diag.chain(edges).fold(0.0, f64::max);
    let rank = float_rank(x, tol)?;
    let pass = max_residual <= tol * p.scale().max(1.0) && rank <= rank_target;
    Ok(CompletionReport {
        pass,
        max_residual,
        rank,
        rank_target,
    })
}

/// `[U; V][U; V]ᵀ`, whose off-diagonal block is `U Vᵀ`.
pub fn symmetric_from_nonsymmetric(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<SymMatrix> {
    if u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "factors have {} and {} columns",
            u.ncols(),
            v.ncols()
        )));
    }
    let mut f = DMatrix::zeros(u.nrows() + v.nrows(), u.ncols());
    f.view_mut((0, 0), u.shape()).copy_from(u);
    f.view_mut((u.nrows(), 0), v.shape()).copy_from(v);
    Ok(SymMatrix::gram(&f))
}

/// Sweeps between stall checks; a restart ends when a window improves the
/// residual by less than one percent.
const STALL_WINDOW: usize = 100;
const LM_ITERS: usize = 200;

/// Specified entries `(i, j, value)` with `i <= j`.
type Entries = [(usize, usize, f64)];

fn max_residual(f: &DMatrix<f64>, d: &[f64], entries: &Entries) -> f64 {
    entries
        .iter()
        .map(|&(i, j, val)| {
            let fit: f64 = (0..d.len()).map(|c| f[(i, c)] * d[c] * f[(j, c)]).sum();
            (fit - val).abs()
        })
        .fold(0.0, f64::max)
}

/// Levenberg–Marquardt on the entries of `F` for `(F D Fᵀ)_ij = value`.
fn lm_refine(f: &mut DMatrix<f64>, d: &[f64], entries: &Entries, target: f64) {
    let (n, r) = (f.nrows(), f.ncols());
    let residuals = |f: &DMatrix<f64>| {
        DVector::from_iterator(
            entries.len(),
            entries.iter().map(|&(i, j, val)| {
                (0..r).map(|c| f[(i, c)] * d[c] * f[(j, c)]).sum::<f64>() - val
            }),
        )
    };
    let mut res = residuals(f);
    let mut lambda = -1.0;
    for _ in 0..LM_ITERS {
        if res.amax() <= target {
            return;
        }
        let mut jac = DMatrix::zeros(entries.len(), n * r);
        for (k, &(i, j, _)) in entries.iter().enumerate() {
            for c in 0..r {
                if i == j {
                    jac[(k, i * r + c)] = 2.0 * d[c] * f[(i, c)];
                } else {
                    jac[(k, i * r + c)] = d[c] * f[(j, c)];
                    jac[(k, j * r + c)] = d[c] * f[(i, c)];
                }
            }
        }
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &res;
        if lambda < 0.0 {
            lambda = 1e-3 * jtj.diagonal().max().max(f64::MIN_POSITIVE);
        }
        let cost = res.norm_squared();
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..n * r {
                a[(k, k)] += lambda;
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&grad)) else {
                lambda *= 4.0;
                continue;
            };
            let mut trial = f.clone();
            for i in 0..n {
                for c in 0..r {
                    trial[(i, c)] -= step[i * r + c];
                }
            }
            let next = residuals(&trial);
            if next.norm_squared() < cost {
                *f = trial;
                res = next;
                lambda = (lambda / 3.0).max(1e-300);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            return;
        }
    }
}

/// Fits `X = F D Fᵀ` of rank `r` to the specified entries of `p` by
/// alternating row-wise least squares, trying signatures `D` from positive
/// semidefinite upwards and restarting from fresh random factors. Each
/// restart ends with a Levenberg–Marquardt refinement of the whole factor.
pub fn als_complete(
    p: &GPartialMatrix,
    r: usize,
    opts: &CompletionOptions,
    rng: &mut Rng,
) -> Result<SymMatrix> {
    let n = p.n();
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!("rank {r} for {n} vertices")));
    }
    let scale = p.scale().max(f64::MIN_POSITIVE);
    let goal = opts.tol * scale.max(1.0);
    // Glued atoms must agree on the separator well below `goal`.
    let polish = goal * 1e-4;
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            let mut row = vec![(i, p.diag()[i])];
            row.extend(p.graph().neighbors(i).map(|j| (j, p.get(i, j).expect("edge"))));
            row
        })
        .collect();
    let entries: Vec<(usize, usize, f64)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().filter(move |&&(j, _)| j >= i).map(move |&(j, v)| (i, j, v)))
        .collect();

    let mut sweeps = 0;
    for negatives in 0..=r {
        let d: Vec<f64> = (0..r).map(|c| if c < r - negatives { 1.0 } else { -1.0 }).collect();
        for _ in 0..opts.max_retries.max(1) {
            let s = (scale / r as f64).sqrt();
            let mut f = DMatrix::from_fn(n, r, |_, _| {
                let z: f64 = StandardNormal.sample(rng);
                s * z
            });
            let mut window_start = f64::INFINITY;
            for it in 0..opts.als_max_iter {
                sweeps += 1;
                for (i, row) in rows.iter().enumerate() {
                    let mut a = DMatrix::from_diagonal_element(r, r, 1e-14 * scale);
                    let mut b = DVector::zeros(r);
                    for &(j, val) in row {
                        // The diagonal equation is linearized at the current row.
                        let g = DVector::from_fn(r, |c, _| f[(j, c)] * d[c]);
                        a += &g * g.transpose();
                        b += &g * val;
                    }
                    if let Some(x) = solve(&a, &b, 1e-15) {
                        let old = f.row(i).transpose();
                        let new = (&old + &x) * 0.5;
                        f.row_mut(i).copy_from(&new.transpose());
                    }
                }
                let res = max_residual(&f, &d, &entries);
                if res <= polish {
                    break;
                }
                if it % STALL_WINDOW == 0 {
                    if res > 0.99 * window_start {
                        break;
                    }
                    window_start = res;
                }
            }
            lm_refine(&mut f, &d, &entries, polish);
            if max_residual(&f, &d, &entries) <= goal {
                let dm = DMatrix::from_diagonal(&DVector::from_column_slice(&d));
                let x = &f * dm * f.transpose();
                return SymMatrix::from_dense(&x, 1e-9);
            }
        }
    }
    Err(Error::NoConvergence { sweeps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Generator;
    use crate::rng::stream;

    #[test]
    fn verify_detects_perturbation() {
        let g = Generator::Path(3).build().unwrap();
        let f = DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]);
        let x = SymMatrix::gram(&f);
        let p = GPartialMatrix::project(&g, &x).unwrap();
        let ok = verify_completion(&p, &x, 1, 1e-8).unwrap();
        assert!(ok.pass);
        assert_eq!(ok.rank, 1);
        let mut bad = x.clone();
        bad.set(0, 1, x.get(0, 1) + 1.0);
        let rep = verify_completion(&p, &bad, 3, 1e-8).unwrap();
        assert!(!rep.pass);
        assert!((rep.max_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonsymmetric_lift() {
        let u = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        let v = DMatrix::from_row_slice(3, 1, &[3.0, 4.0, 5.0]);
        let x = symmetric_from_nonsymmetric(&u, &v).unwrap();
        assert_eq!(x.n(), 5);
        assert_eq!(x.get(1, 4), 10.0);
        assert_eq!(float_rank(&x, 1e-10).unwrap(), 1);
        let x0 = symmetric_from_nonsymmetric(&DMatrix::zeros(2, 0), &DMatrix::zeros(3, 0)).unwrap();
        assert_eq!(x0, SymMatrix::zeros(5));
        assert!(symmetric_from_nonsymmetric(&u, &DMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn als_fits_cycle_data() {
        let mut rng = stream(3, 0);
        for n in [4, 5, 6] {
            let g = Generator::Cycle(n).build().unwrap();
            let f = DMatrix::from_fn(n, 3, |_, _| StandardNormal.sample(&mut rng));
            let p = GPartialMatrix::project(&g, &SymMatrix::gram(&f)).unwrap();
            let x = als_complete(&p, 3, &CompletionOptions::default(), &mut rng).unwrap();
            assert!(verify_completion(&p, &x, 3, 1e-8).unwrap().pass);
        }
    }

    #[test]
    fn als_fits_indefinite_path_data() {
        let g = Generator::Path(4).build().unwrap();
        let p = GPartialMatrix::new(g, vec![1.0, -2.0, 0.5, 3.0], vec![0.3, -1.1, 2.0]).unwrap();
        let x = als_complete(&p, 2, &CompletionOptions::default(), &mut stream(0, 9)).unwrap();
        assert!(verify_completion(&p, &x, 2, 1e-8).unwrap().pass);
    }
}
