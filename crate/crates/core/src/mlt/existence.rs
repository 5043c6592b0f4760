//! Positive definite completability of a partial matrix.
//!
//! A PD completion exists iff the supremum of `λ_min(X)` over completions
//! `X` is positive. When it does not, a nonzero PSD matrix `M` supported on
//! the diagonal and the edges with `⟨M, p⟩ <= 0` proves it: every
//! completion `X` has `⟨M, X⟩ = ⟨M, p⟩`, which would be positive for PD `X`.

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::completion::GPartialMatrix;
use crate::error::Result;
use crate::graph::Graph;
use crate::linalg::{min_eigenvalue_and_vector, sym_eigen, SymMatrix, DEFAULT_RANK_TOL};

/// A matrix in `L_G`: zero off the diagonal and the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateMatrix {
    pub graph: Graph,
    pub matrix: SymMatrix,
}

/// Outcome of the soundness checks on a certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateCheck {
    /// Every entry off the diagonal and the edges is exactly zero.
    pub support: bool,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// `‖M W‖∞` when a kernel basis was supplied.
    pub kernel_residual: Option<f64>,
    pub pass: bool,
}

impl CertificateMatrix {
    /// Builds a certificate scaled to trace one; zero entries off the
    /// pattern are enforced exactly.
    pub fn normalized(graph: &Graph, matrix: &SymMatrix) -> Option<Self> {
        let tr = matrix.trace();
        if !tr.is_finite() || tr <= 0.0 {
            return None;
        }
        let n = graph.n();
        let m = SymMatrix::from_fn(n, |i, j| {
            if i == j || graph.has_edge(i, j) {
                matrix.get(i, j) / tr
            } else {
                0.0
            }
        });
        Some(CertificateMatrix {
            graph: graph.clone(),
            matrix: m,
        })
    }

    /// Support, PSD (`λ_min >= −10⁻⁸‖M‖`), unit trace and, with `w`,
    /// `‖M W‖∞ <= 10⁻⁸`.
    pub fn check(&self, w: Option<&DMatrix<f64>>) -> Result<CertificateCheck> {
        let n = self.graph.n();
        let mut support = true;
        for i in 0..n {
            for j in i + 1..n {
                if !self.graph.has_edge(i, j) && self.matrix.get(i, j) != 0.0 {
                    support = false;
                }
            }
        }
        let min_eigenvalue = min_eigenvalue_and_vector(&self.matrix)?.0;
        let norm = self.matrix.to_dense().norm();
        let trace = self.matrix.trace();
        let kernel_residual = w.map(|w| (self.matrix.to_dense() * w).amax());
        let pass = support
            && min_eigenvalue >= -1e-8 * norm
            && (trace - 1.0).abs() <= 1e-10
            && kernel_residual.is_none_or(|r| r <= 1e-8);
        Ok(CertificateCheck {
            support,
            min_eigenvalue,
            trace,
            kernel_residual,
            pass,
        })
    }

    /// `⟨M, p⟩`.
    pub fn pairing(&self, p: &GPartialMatrix) -> f64 {
        p.pair(&self.matrix)
    }
}

impl Serialize for CertificateMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            data: Vec<f64>,
            support: &'a [[usize; 2]],
        }
        let support: Vec<[usize; 2]> =
            self.graph.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect();
        Repr {
            n: self.graph.n(),
            data: self.matrix.row_major(),
            support: &support,
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExistenceStatus {
    Exists,
    NotExists,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceVerdict {
    pub status: ExistenceStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SymMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<f64>,
    /// Best `λ_min` reached by the ascent.
    pub lambda_min: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceOptions {
    /// Relative tolerance against the largest specified entry.
    pub tol: f64,
    /// Cap on `λ_min` ascent steps.
    pub iter_cap: usize,
    /// Cap on certificate search steps.
    pub certificate_iter_cap: usize,
}

impl Default for ExistenceOptions {
    fn default() -> Self {
        ExistenceOptions {
            tol: DEFAULT_RANK_TOL,
            iter_cap: 20_000,
            certificate_iter_cap: 500,
        }
    }
}

/// Free positions of the pattern, `i < j`.
fn free_entries(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.n();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !g.has_edge(i, j))
        .collect()
}

/// A certificate read off the data alone: a non-positive diagonal entry or
/// a 2×2 edge block that is not PD.
fn local_obstruction(p: &GPartialMatrix) -> Option<CertificateMatrix> {
    let g = p.graph();
    let n = p.n();
    let d = p.diag();
    if let Some(i) = (0..n).find(|&i| d[i] <= 0.0) {
        let mut m = SymMatrix::zeros(n);
        m.set(i, i, 1.0);
        return CertificateMatrix::normalized(g, &m);
    }
    for (&(i, j), &v) in g.edges().iter().zip(p.edge_vals()) {
        if d[i] * d[j] - v * v <= 0.0 {
            // v = (√d_j, −sign(p_ij)√d_i) pairs to 2√(d_i d_j)(√(d_i d_j) − |p_ij|).
            let (a, b) = (d[j].sqrt(), -v.signum() * d[i].sqrt());
            let mut m = SymMatrix::zeros(n);
            m.set(i, i, a * a);
            m.set(j, j, b * b);
            m.set(i, j, a * b);
            return CertificateMatrix::normalized(g, &m);
        }
    }
    None
}

/// Decides whether `p` has a positive definite completion.
///
/// Subgradient ascent on `λ_min` over the free entries (step `c/√k`,
/// `c = 0.1 · scale`) reports `Exists` once `λ_min > tol · scale`. Failing
/// that, a boundary certificate with pairing `<= −tol · scale`, or with
/// pairing `<= tol · scale` while the ascent stayed below `−tol · scale`,
/// reports `NotExists`. Everything in between is `Undetermined`.
pub fn pd_completion_exists(p: &GPartialMatrix, opts: &ExistenceOptions) -> Result<ExistenceVerdict> {
    let scale = p.scale();
    let thresh = opts.tol * scale.max(f64::MIN_POSITIVE);
    let g = p.graph();

    if let Some(cert) = local_obstruction(p) {
        let pairing = cert.pairing(p);
        return Ok(ExistenceVerdict {
            status: ExistenceStatus::NotExists,
            witness: None,
            certificate: Some(cert),
            pairing: Some(pairing),
            lambda_min: f64::NAN,
            iterations: 0,
        });
    }

    let free = free_entries(g);
    let mut x = p.zero_fill();
    let step0 = 0.1 * scale;
    let mut best = f64::NEG_INFINITY;
    let mut best_x = x.clone();
    let mut best_vec = DVector::zeros(p.n());
    let mut iterations = 0;
    let exists = |x: SymMatrix, lambda: f64, iterations: usize| ExistenceVerdict {
        status: ExistenceStatus::Exists,
        witness: Some(x),
        certificate: None,
        pairing: None,
        lambda_min: lambda,
        iterations,
    };
    for k in 1..=opts.iter_cap.max(1) {
        iterations = k;
        let (lambda, v) = min_eigenvalue_and_vector(&x)?;
        if lambda > best {
            best = lambda;
            best_x = x.clone();
            best_vec = v.clone();
        }
        if lambda > thresh {
            return Ok(exists(x, lambda, iterations));
        }
        if free.is_empty() {
            break;
        }
        let step = step0 / (k as f64).sqrt();
        for &(i, j) in &free {
            x.set(i, j, x.get(i, j) + step * 2.0 * v[i] * v[j]);
        }
    }

    let mut cert = None;
    if free.is_empty() {
        // With nothing free the bottom eigenvector is itself a certificate.
        let mut m = SymMatrix::zeros(p.n());
        for i in 0..p.n() {
            for j in i..p.n() {
                m.set(i, j, best_vec[i] * best_vec[j]);
            }
        }
        cert = CertificateMatrix::normalized(g, &m);
    } else {
        let refined = barrier_refine(p, &best_x, &free, thresh)?;
        iterations += refined.steps;
        if refined.t > best {
            best = refined.t;
        }
        if refined.t > thresh {
            return Ok(exists(refined.x, refined.t, iterations));
        }
        if let Some(c) = refined.certificate {
            if c.pairing(p) <= thresh && c.check(None)?.pass {
                cert = Some(c);
            }
        }
        if cert.is_none() {
            cert = boundary_certificate_search(p, opts.tol, opts.certificate_iter_cap)?;
        }
    }
    let pairing = cert.as_ref().map(|c| c.pairing(p));
    let status = match pairing {
        Some(q) if q <= -thresh => ExistenceStatus::NotExists,
        Some(q) if q <= thresh && best < -thresh => ExistenceStatus::NotExists,
        _ => ExistenceStatus::Undetermined,
    };
    let keep = status == ExistenceStatus::NotExists;
    Ok(ExistenceVerdict {
        status,
        witness: None,
        certificate: if keep { cert } else { None },
        pairing: if keep { pairing } else { None },
        lambda_min: best,
        iterations,
    })
}

struct Refined {
    /// Best `t` with `X − tI` positive definite.
    t: f64,
    x: SymMatrix,
    /// `μ (X − tI)⁻¹` at the last central point, pattern-projected.
    certificate: Option<CertificateMatrix>,
    steps: usize,
}

/// Interior-point refinement of `max λ_min`: maximize `t + μ log det(X(y) − tI)`
/// by damped Newton steps in the free entries `y` and `t`, shrinking `μ`.
/// At a central point `μ (X − tI)⁻¹` has unit trace, vanishes on the free
/// entries and pairs with the data to `t + nμ`, so it doubles as a
/// certificate once that bound is non-positive.
fn barrier_refine(
    p: &GPartialMatrix,
    start: &SymMatrix,
    free: &[(usize, usize)],
    thresh: f64,
) -> Result<Refined> {
    const OUTER: usize = 80;
    const INNER: usize = 60;
    let n = p.n();
    let f = free.len();
    let scale = p.scale().max(f64::MIN_POSITIVE);
    let mut x = start.to_dense();
    let lam0 = min_eigenvalue_and_vector(start)?.0;
    let mut t = lam0 - 0.1 * scale;
    let mut mu = scale / n as f64;
    let mut steps = 0;
    let mut certificate = None;

    let shifted = |x: &DMatrix<f64>, t: f64| {
        let mut z = x.clone();
        for i in 0..n {
            z[(i, i)] -= t;
        }
        z
    };
    let objective = |x: &DMatrix<f64>, t: f64, mu: f64| -> Option<f64> {
        let ch = shifted(x, t).cholesky()?;
        let logdet: f64 = ch.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        Some(t + mu * logdet)
    };

    for _ in 0..OUTER {
        for _ in 0..INNER {
            steps += 1;
            let Some(ch) = shifted(&x, t).cholesky() else {
                break;
            };
            let zi = ch.inverse();
            let zi2 = &zi * &zi;
            let mut grad = DVector::zeros(f + 1);
            let mut hess = DMatrix::zeros(f + 1, f + 1);
            for (a, &(i, j)) in free.iter().enumerate() {
                grad[a] = 2.0 * mu * zi[(i, j)];
                for (b, &(k, l)) in free.iter().enumerate().skip(a) {
                    let h = 2.0 * mu * (zi[(i, k)] * zi[(j, l)] + zi[(i, l)] * zi[(j, k)]);
                    hess[(a, b)] = h;
                    hess[(b, a)] = h;
                }
                hess[(a, f)] = -2.0 * mu * zi2[(i, j)];
                hess[(f, a)] = hess[(a, f)];
            }
            grad[f] = 1.0 - mu * zi.trace();
            hess[(f, f)] = mu * zi2.trace();
            // `hess` is the negated Hessian, so the step solves hess · d = grad.
            let Some(d) = hess.clone().cholesky().map(|c| c.solve(&grad)) else {
                break;
            };
            let decrement = grad.dot(&d);
            let base = objective(&x, t, mu).expect("current point is interior");
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let mut xn = x.clone();
                for (a, &(i, j)) in free.iter().enumerate() {
                    xn[(i, j)] += alpha * d[a];
                    xn[(j, i)] += alpha * d[a];
                }
                let tn = t + alpha * d[f];
                if let Some(v) = objective(&xn, tn, mu) {
                    if v >= base + 0.25 * alpha * decrement {
                        x = xn;
                        t = tn;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if t > thresh {
                let out = SymMatrix::from_dense(&x, 1e-9)?;
                return Ok(Refined { t, x: out, certificate: None, steps });
            }
            if !moved || decrement < 1e-14 * scale {
                break;
            }
        }
        if let Some(ch) = shifted(&x, t).cholesky() {
            let mut m = ch.inverse();
            m *= mu;
            certificate = CertificateMatrix::normalized(p.graph(), &SymMatrix::from_dense(&m, 1e-6)?);
        }
        if n as f64 * mu < 0.01 * thresh {
            break;
        }
        mu *= 0.2;
    }
    let out = SymMatrix::from_dense(&x, 1e-9)?;
    Ok(Refined { t, x: out, certificate, steps })
}

fn project_psd(m: &SymMatrix) -> Result<SymMatrix> {
    let e = sym_eigen(m)?;
    let n = m.n();
    let mut out = SymMatrix::zeros(n);
    for (k, &lam) in e.values.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let v = e.vectors.column(k);
        for i in 0..n {
            for j in i..n {
                out.set(i, j, out.get(i, j) + lam * v[i] * v[j]);
            }
        }
    }
    Ok(out)
}

/// Zeroes entries off the pattern and shifts the diagonal to trace one.
fn project_affine(g: &Graph, m: &mut SymMatrix) {
    let n = g.n();
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                m.set(i, j, 0.0);
            }
        }
    }
    let shift = (1.0 - m.trace()) / n as f64;
    for i in 0..n {
        m.set(i, i, m.get(i, i) + shift);
    }
}

/// Searches for a trace-one PSD `M ∈ L_G` with small pairing `⟨M, p⟩`:
/// gradient steps on the pairing alternate with projections onto the PSD
/// cone and onto the pattern with unit trace. Each iterate is made exactly
/// feasible by adding `max(0, −λ_min) I` and renormalizing; the best such
/// candidate is returned if its pairing is at most `tol · scale`.
pub fn boundary_certificate_search(
    p: &GPartialMatrix,
    tol: f64,
    iter_cap: usize,
) -> Result<Option<CertificateMatrix>> {
    const INNER: usize = 10;
    let g = p.graph();
    let n = p.n();
    let p0 = p.zero_fill();
    let pnorm = p0.to_dense().norm();
    if pnorm == 0.0 {
        return Ok(CertificateMatrix::normalized(g, &SymMatrix::identity(n)));
    }
    let thresh = tol * p.scale();
    let mut m = SymMatrix::identity(n);
    m.scale(1.0 / n as f64);
    let mut best: Option<(f64, CertificateMatrix)> = None;
    for k in 1..=iter_cap.max(1) {
        let step = 1.0 / (n as f64 * (k as f64).sqrt() * pnorm);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, m.get(i, j) - step * p0.get(i, j));
            }
        }
        for _ in 0..INNER {
            m = project_psd(&m)?;
            project_affine(g, &mut m);
        }
        let (lam, _) = min_eigenvalue_and_vector(&m)?;
        let mut c = m.clone();
        if lam < 0.0 {
            for i in 0..n {
                c.set(i, i, c.get(i, i) - lam);
            }
        }
        if let Some(cert) = CertificateMatrix::normalized(g, &c) {
            let q = cert.pairing(p);
            if best.as_ref().is_none_or(|(b, _)| q < *b) {
                best = Some((q, cert));
            }
            if q <= -thresh {
                break;
            }
        }
    }
    Ok(best.filter(|(q, _)| *q <= thresh).map(|(_, c)| c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Generator;

    fn c4_obstruction() -> GPartialMatrix {
        let g = Generator::Cycle(4).build().unwrap();
        // Edges in order (0,1), (0,3), (1,2), (2,3).
        let vals: Vec<f64> = g
            .edges()
            .iter()
            .map(|&e| if e == (0, 3) { -1.0 } else { 1.0 })
            .collect();
        GPartialMatrix::new(g, vec![1.0; 4], vals).unwrap()
    }

    #[test]
    fn identity_data_is_completable() {
        let g = Generator::Cycle(5).build().unwrap();
        let p = GPartialMatrix::project(&g, &SymMatrix::identity(5)).unwrap();
        let v = pd_completion_exists(&p, &ExistenceOptions::default()).unwrap();
        assert_eq!(v.status, ExistenceStatus::Exists);
        assert_eq!(v.witness.unwrap(), SymMatrix::identity(5));
        assert!(boundary_certificate_search(&p, 1e-8, 200).unwrap().is_none());
    }

    #[test]
    fn cycle_obstruction_is_certified() {
        let p = c4_obstruction();
        let v = pd_completion_exists(&p, &ExistenceOptions::default()).unwrap();
        assert_eq!(v.status, ExistenceStatus::NotExists);
        let cert = v.certificate.unwrap();
        assert!(cert.check(None).unwrap().pass);
        assert!(v.pairing.unwrap() <= 1e-6);

        let found = boundary_certificate_search(&p, 1e-8, 500).unwrap().unwrap();
        assert!(found.check(None).unwrap().pass);
        assert!(found.pairing(&p) <= 1e-6);
    }

    #[test]
    fn local_obstructions() {
        let g = Generator::Path(2).build().unwrap();
        let p = GPartialMatrix::new(g.clone(), vec![1.0, 1.0], vec![2.0]).unwrap();
        let v = pd_completion_exists(&p, &ExistenceOptions::default()).unwrap();
        assert_eq!(v.status, ExistenceStatus::NotExists);
        assert!(v.pairing.unwrap() <= 0.0);
        assert!(v.certificate.unwrap().check(None).unwrap().pass);

        let p = GPartialMatrix::new(g, vec![0.0, 1.0], vec![0.0]).unwrap();
        let v = pd_completion_exists(&p, &ExistenceOptions::default()).unwrap();
        assert_eq!(v.status, ExistenceStatus::NotExists);
    }

    #[test]
    fn complete_pattern_uses_eigenvector() {
        let g = Generator::Complete(3).build().unwrap();
        let a = SymMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { 0.9 });
        let p = GPartialMatrix::project(&g, &a).unwrap();
        assert_eq!(
            pd_completion_exists(&p, &ExistenceOptions::default()).unwrap().status,
            ExistenceStatus::Exists
        );
        let b = SymMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { -0.9 });
        let p = GPartialMatrix::project(&g, &b).unwrap();
        let v = pd_completion_exists(&p, &ExistenceOptions::default()).unwrap();
        assert_eq!(v.status, ExistenceStatus::NotExists);
        assert!(v.pairing.unwrap() < 0.0);
    }

    #[test]
    fn certificate_serializes_with_support() {
        let p = c4_obstruction();
        let cert = boundary_certificate_search(&p, 1e-8, 500).unwrap().unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["n"], 4);
        assert_eq!(json["data"].as_array().unwrap().len(), 16);
        assert_eq!(json["support"].as_array().unwrap().len(), 4);
    }
}
