//! Filling a single missing corner entry of a bordered symmetric matrix
//!
//! ```text
//!        ⎛ a₀  a₁ … aₙ   t    ⎞
//! P(t) = ⎜ a₁            b₁   ⎟
//!        ⎜ ⋮      M      ⋮    ⎟
//!        ⎜ aₙ            bₙ   ⎟
//!        ⎝ t   b₁ … bₙ  bₙ₊₁  ⎠
//! ```
//!
//! With `M` invertible the Schur complement of `M` gives
//! `det P(t) = det M · [(a₀ − aᵀM⁻¹a)(bₙ₊₁ − bᵀM⁻¹b) − (t − aᵀM⁻¹b)²]`,
//! so the roots are `aᵀM⁻¹b ± √((a₀ − aᵀM⁻¹a)(bₙ₊₁ − bᵀM⁻¹b))`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{float_rank, solve, SymMatrix};

/// Pivot threshold for treating the core block as invertible.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BorderedMatrix {
    /// The symmetric `n × n` core.
    pub core: DMatrix<f64>,
    /// First row `(a₀, a₁, …, aₙ)`.
    pub a: Vec<f64>,
    /// Last column `(b₁, …, bₙ, bₙ₊₁)`.
    pub b: Vec<f64>,
}

/// Roots of `det P(t)`; complex roots come as a conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CornerRoots {
    Real(f64, f64),
    Complex { re: f64, im: f64 },
}

impl CornerRoots {
    pub fn is_real(&self) -> bool {
        matches!(self, CornerRoots::Real(..))
    }
}

impl BorderedMatrix {
    pub fn new(core: DMatrix<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = core.nrows();
        if core.ncols() != n || a.len() != n + 1 || b.len() != n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "core {}x{}, a has {}, b has {} (expected {} each)",
                core.nrows(),
                core.ncols(),
                a.len(),
                b.len(),
                n + 1
            )));
        }
        Ok(BorderedMatrix { core, a, b })
    }

    pub fn n(&self) -> usize {
        self.core.nrows()
    }

    fn a_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.a[1..])
    }

    fn b_vec(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.b[..self.n()])
    }

    fn b_last(&self) -> f64 {
        self.b[self.n()]
    }

    /// The assembled `(n+2) × (n+2)` matrix with corner entry `t`.
    pub fn assemble(&self, t: f64) -> DMatrix<f64> {
        let n = self.n();
        let mut p = DMatrix::zeros(n + 2, n + 2);
        p.view_mut((1, 1), (n, n)).copy_from(&self.core);
        for i in 0..=n {
            p[(0, i)] = self.a[i];
            p[(i, 0)] = self.a[i];
            p[(i + 1, n + 1)] = self.b[i];
            p[(n + 1, i + 1)] = self.b[i];
        }
        p[(0, n + 1)] = t;
        p[(n + 1, 0)] = t;
        p
    }

    fn upper_left(&self) -> SymMatrix {
        let p = self.assemble(0.0);
        let n = self.n();
        SymMatrix::from_fn(n + 1, |i, j| p[(i, j)])
    }

    fn bottom_right(&self) -> SymMatrix {
        let p = self.assemble(0.0);
        let n = self.n();
        SymMatrix::from_fn(n + 1, |i, j| p[(i + 1, j + 1)])
    }

    fn core_solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        solve(&self.core, rhs, SINGULAR_TOL)
            .ok_or_else(|| Error::Singular("core block M is not invertible".into()))
    }

    /// `bᵀ M⁻¹ a`, the corner value forced by the row relations.
    fn relation_value(&self) -> Result<f64> {
        let u = self.core_solve(&self.a_vec())?;
        Ok(u.dot(&self.b_vec()))
    }
}

/// Both roots of `det P(t)`. Each real root gives `rank P(t₀) <= n + 1`.
pub fn one_entry_case_a(p: &BorderedMatrix) -> Result<CornerRoots> {
    let a = p.a_vec();
    let b = p.b_vec();
    let ma = p.core_solve(&a)?;
    let mb = p.core_solve(&b)?;
    let center = ma.dot(&b);
    let left = p.a[0] - ma.dot(&a);
    let right = p.b_last() - mb.dot(&b);
    let disc = left * right;
    if disc >= 0.0 {
        let s = disc.sqrt();
        Ok(CornerRoots::Real(center + s, center - s))
    } else {
        Ok(CornerRoots::Complex {
            re: center,
            im: (-disc).sqrt(),
        })
    }
}

/// Unique corner value when the upper-left block is invertible and the
/// bottom-right block has rank `n`; `P(t₀)` then has rank `n + 1`.
pub fn one_entry_case_b(p: &BorderedMatrix, tol: f64) -> Result<f64> {
    let n = p.n();
    let ul = float_rank(&p.upper_left(), tol)?;
    let br = float_rank(&p.bottom_right(), tol)?;
    if ul != n + 1 || br != n {
        return Err(Error::RankPrecondition(format!(
            "need ranks ({}, {}) for the corner blocks, found ({ul}, {br})",
            n + 1,
            n
        )));
    }
    p.relation_value()
}

/// Corner value when both corner blocks have rank `n`: write the first row
/// as `Σ uᵢ (aᵢ, Mᵢ)` and set `t₀ = Σ uᵢ bᵢ`. `P(t₀)` has rank `n`.
pub fn one_entry_case_c(p: &BorderedMatrix, tol: f64) -> Result<f64> {
    let n = p.n();
    let ul = float_rank(&p.upper_left(), tol)?;
    let br = float_rank(&p.bottom_right(), tol)?;
    if ul != n || br != n {
        return Err(Error::RankPrecondition(format!(
            "need rank {n} for both corner blocks, found ({ul}, {br})"
        )));
    }
    let u = p.core_solve(&p.a_vec())?;
    Ok(u.dot(&p.b_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    fn scalar(m: f64, a: [f64; 2], b: [f64; 2]) -> BorderedMatrix {
        BorderedMatrix::new(DMatrix::from_element(1, 1, m), a.to_vec(), b.to_vec()).unwrap()
    }

    fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
        float_rank(&SymMatrix::from_dense(m, 1e-12).unwrap(), tol).unwrap()
    }

    #[test]
    fn case_a_double_roots() {
        assert_eq!(
            one_entry_case_a(&scalar(1.0, [1.0, 0.0], [1.0, 1.0])).unwrap(),
            CornerRoots::Real(0.0, 0.0)
        );
        assert_eq!(
            one_entry_case_a(&scalar(1.0, [2.0, 1.0], [1.0, 1.0])).unwrap(),
            CornerRoots::Real(1.0, 1.0)
        );
    }

    #[test]
    fn case_a_proportional_borders_give_a_square() {
        // b = s·a on the core coordinates with bₙ₊₁ = s²·a₀ makes the two
        // Schur factors proportional, so the discriminant is a square.
        let core = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let a = vec![3.0, 1.0, -1.0];
        let s = 2.0;
        let b = vec![s * a[1], s * a[2], s * s * a[0]];
        let roots = one_entry_case_a(&BorderedMatrix::new(core, a, b).unwrap()).unwrap();
        match roots {
            CornerRoots::Real(t1, t2) => {
                let p = BorderedMatrix::new(
                    DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
                    vec![3.0, 1.0, -1.0],
                    vec![2.0, -2.0, 12.0],
                )
                .unwrap();
                for t in [t1, t2] {
                    assert!(p.assemble(t).determinant().abs() < 1e-9);
                }
            }
            CornerRoots::Complex { .. } => panic!("expected real roots"),
        }
    }

    #[test]
    fn case_a_complex_pair_when_discriminant_negative() {
        // a₀ − aᵀM⁻¹a = -1, bₙ₊₁ − bᵀM⁻¹b = 1.
        let r = one_entry_case_a(&scalar(1.0, [0.0, 1.0], [1.0, 2.0])).unwrap();
        assert_eq!(r, CornerRoots::Complex { re: 1.0, im: 1.0 });
        assert!(!r.is_real());
    }

    #[test]
    fn case_a_rejects_singular_core() {
        assert!(matches!(
            one_entry_case_a(&scalar(0.0, [1.0, 1.0], [1.0, 1.0])),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn case_b_examples() {
        let p = scalar(1.0, [1.0, 0.0], [1.0, 1.0]);
        let t = one_entry_case_b(&p, 1e-8).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(rank(&p.assemble(t), 1e-8), 2);

        let p = BorderedMatrix::new(DMatrix::identity(2, 2), vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 1.0])
            .unwrap();
        let t = one_entry_case_b(&p, 1e-8).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(rank(&p.assemble(t), 1e-8), 3);
    }

    #[test]
    fn case_b_scales_linearly_in_b() {
        let core = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5]);
        let a = vec![4.0, 1.0, 0.7];
        let bv = DVector::from_vec(vec![0.4, -1.2]);
        let make = |s: f64| {
            let sb = &bv * s;
            let last = sb.dot(&(core.clone().try_inverse().unwrap() * &sb));
            BorderedMatrix::new(core.clone(), a.clone(), vec![sb[0], sb[1], last]).unwrap()
        };
        let t1 = one_entry_case_b(&make(1.0), 1e-8).unwrap();
        let t3 = one_entry_case_b(&make(3.0), 1e-8).unwrap();
        assert!((t3 - 3.0 * t1).abs() < 1e-12);
    }

    #[test]
    fn case_b_checks_ranks() {
        // Bottom-right block [[1,1],[1,2]] has full rank 2.
        assert!(matches!(
            one_entry_case_b(&scalar(1.0, [1.0, 0.0], [1.0, 2.0]), 1e-8),
            Err(Error::RankPrecondition(_))
        ));
    }

    #[test]
    fn case_c_examples() {
        let p = scalar(1.0, [1.0, 1.0], [1.0, 1.0]);
        let t = one_entry_case_c(&p, 1e-8).unwrap();
        assert_eq!(t, 1.0);
        assert_eq!(rank(&p.assemble(t), 1e-8), 1);

        let p = scalar(2.0, [2.0, 2.0], [2.0, 2.0]);
        assert_eq!(one_entry_case_c(&p, 1e-8).unwrap(), 2.0);

        assert!(matches!(
            one_entry_case_c(&scalar(1.0, [2.0, 1.0], [1.0, 1.0]), 1e-8),
            Err(Error::RankPrecondition(_))
        ));
    }
}
