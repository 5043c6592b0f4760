//! Gluing low-rank completions of two atoms across a clique separator.
//!
//! Let the atoms be `V₁ = A ∪ K` and `V₂ = K ∪ B` with completions of ranks
//! `r₁ >= r₂`. Vertices of `A` are moved into the shared part one at a time.
//! While the second block has more rank than the shared part, the new row is
//! filled with random entries against a basis of the second block, one
//! entry is solved for with a quadratic (so the rank does not grow) and the
//! rest follow from the linear relations among columns. Once the shared part
//! carries the full rank `r₁` everything left is forced by those relations.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use super::one_entry::{one_entry_case_a, BorderedMatrix, CornerRoots};
use super::{als_complete, CompletionOptions, GPartialMatrix};
use crate::error::{Error, Result};
use crate::graph::CliqueSumTree;
use crate::linalg::{float_rank, solve, SymMatrix};
use crate::rng::{stream, Rng};

const PIVOT_TOL: f64 = 1e-12;

/// Completes `p` from a two-atom clique-sum decomposition, fitting each
/// atom at the given target rank first (clique atoms use their data).
pub fn clique_sum_complete(
    tree: &CliqueSumTree,
    p: &GPartialMatrix,
    targets: [usize; 2],
    opts: &CompletionOptions,
) -> Result<SymMatrix> {
    let atoms = two_atoms(tree)?;
    let mut fitted = Vec::with_capacity(2);
    for (k, atom) in atoms.iter().enumerate() {
        let sub = p.restrict(atom);
        let x = if sub.graph().is_complete() {
            let x = sub.zero_fill();
            let r = float_rank(&x, opts.tol)?;
            if r > targets[k] {
                return Err(Error::RankPrecondition(format!(
                    "atom {} has rank {r} data, above the target {}",
                    k + 1,
                    targets[k]
                )));
            }
            x
        } else {
            als_complete(&sub, targets[k], opts, &mut stream(opts.seed, k as u64))?
        };
        fitted.push(x);
    }
    clique_sum_complete_from(tree, p, [&fitted[0], &fitted[1]], opts)
}

/// Glues supplied atom completions (indexed in the atom's vertex order).
pub fn clique_sum_complete_from(
    tree: &CliqueSumTree,
    p: &GPartialMatrix,
    atom_completions: [&SymMatrix; 2],
    opts: &CompletionOptions,
) -> Result<SymMatrix> {
    let atoms = two_atoms(tree)?;
    let n = p.n();
    let g = p.graph();

    let mut covered = vec![false; n];
    for atom in &atoms {
        for &v in atom.iter() {
            if v >= n {
                return Err(Error::PatternMismatch(format!("atom vertex {} out of range", v + 1)));
            }
            covered[v] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return Err(Error::PatternMismatch("atoms do not cover every vertex".into()));
    }
    let sep: Vec<usize> = atoms[0].iter().copied().filter(|v| atoms[1].contains(v)).collect();
    if !g.is_clique(&sep) {
        return Err(Error::PatternMismatch("separator is not a clique".into()));
    }
    let only1: Vec<usize> = atoms[0].iter().copied().filter(|v| !sep.contains(v)).collect();
    let only2: Vec<usize> = atoms[1].iter().copied().filter(|v| !sep.contains(v)).collect();
    if only1.iter().any(|&a| only2.iter().any(|&b| g.has_edge(a, b))) {
        return Err(Error::PatternMismatch("an edge crosses the separator".into()));
    }

    let scale = p.scale().max(f64::MIN_POSITIVE);
    let mut x = DMatrix::zeros(n, n);
    let mut ranks = [0; 2];
    for (k, (atom, xa)) in atoms.iter().zip(atom_completions).enumerate() {
        if xa.n() != atom.len() {
            return Err(Error::DimensionMismatch(format!(
                "atom {} has {} vertices, completion is {}x{}",
                k + 1,
                atom.len(),
                xa.n(),
                xa.n()
            )));
        }
        let sub = p.restrict(atom);
        for a in 0..atom.len() {
            for b in a..atom.len() {
                if let Some(v) = sub.get(a, b) {
                    if (xa.get(a, b) - v).abs() > opts.tol * scale.max(1.0) {
                        return Err(Error::PatternMismatch(format!(
                            "atom {} completion differs from the data at ({}, {})",
                            k + 1,
                            atom[a] + 1,
                            atom[b] + 1
                        )));
                    }
                }
                let (i, j) = (atom[a], atom[b]);
                if k == 0 || !(sep.contains(&i) && sep.contains(&j)) {
                    x[(i, j)] = xa.get(a, b);
                    x[(j, i)] = xa.get(a, b);
                }
            }
        }
        ranks[k] = float_rank(xa, opts.tol)?;
    }

    let (side_a, side_b, r1, r2) = if ranks[0] >= ranks[1] {
        (only1, only2, ranks[0], ranks[1])
    } else {
        (only2, only1, ranks[1], ranks[0])
    };
    let mut rng = stream(opts.seed, 2);
    glue(&mut x, sep, side_a, &side_b, r1, r2, &mut rng, opts)?;

    let out = SymMatrix::from_dense(&x, 1e-9)?;
    let report = super::verify_completion(p, &out, r1, opts.tol)?;
    if !report.pass {
        return Err(Error::Verification(format!(
            "glued matrix has rank {} (target {}), residual {:.3e}",
            report.rank, r1, report.max_residual
        )));
    }
    Ok(out)
}

fn two_atoms(tree: &CliqueSumTree) -> Result<[&Vec<usize>; 2]> {
    match tree.atoms.as_slice() {
        [a, b] => Ok([a, b]),
        atoms => Err(Error::InvalidParameter(format!(
            "expected a decomposition with two atoms, got {}",
            atoms.len()
        ))),
    }
}

fn block(x: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| x[(rows[i], cols[j])])
}

fn column(x: &DMatrix<f64>, rows: &[usize], col: usize) -> DVector<f64> {
    DVector::from_fn(rows.len(), |i, _| x[(rows[i], col)])
}

fn set_sym(x: &mut DMatrix<f64>, i: usize, j: usize, v: f64) {
    x[(i, j)] = v;
    x[(j, i)] = v;
}

/// Schur complement of `v` against the principal block on `basis`.
fn schur(x: &DMatrix<f64>, basis: &[usize], v: usize) -> Option<f64> {
    if basis.is_empty() {
        return Some(x[(v, v)]);
    }
    let c = column(x, basis, v);
    let u = solve(&block(x, basis, basis), &c, PIVOT_TOL)?;
    Some(x[(v, v)] - u.dot(&c))
}

/// Greedily extends `basis` from `candidates` by the vertex with the
/// largest Schur complement, until `limit` or no vertex clears `floor`.
fn extend_basis(
    x: &DMatrix<f64>,
    mut basis: Vec<usize>,
    candidates: &[usize],
    limit: usize,
    floor: f64,
) -> Vec<usize> {
    while basis.len() < limit {
        let best = candidates
            .iter()
            .filter(|v| !basis.contains(v))
            .filter_map(|&v| schur(x, &basis, v).map(|s| (v, s.abs())))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((v, s)) if s > floor => basis.push(v),
            _ => break,
        }
    }
    basis
}

/// Sets `x[v, j]` for each `j` from the column relations over `basis`.
fn fill_by_relations(x: &mut DMatrix<f64>, basis: &[usize], v: usize, targets: &[usize]) -> Result<()> {
    let m = block(x, basis, basis);
    let row = column(x, basis, v);
    for &j in targets {
        let c = solve(&m, &column(x, basis, j), PIVOT_TOL)
            .ok_or_else(|| Error::Singular("basis block lost full rank".into()))?;
        set_sym(x, v, j, row.dot(&c));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn glue(
    x: &mut DMatrix<f64>,
    mut shared: Vec<usize>,
    mut rest_a: Vec<usize>,
    side_b: &[usize],
    r1: usize,
    mut r2: usize,
    rng: &mut Rng,
    opts: &CompletionOptions,
) -> Result<()> {
    let floor = opts.tol * x.amax().max(f64::MIN_POSITIVE);
    loop {
        let sh_basis = extend_basis(x, Vec::new(), &shared, usize::MAX, floor);
        let k = sh_basis.len();
        if k >= r1 {
            for &y in &rest_a {
                fill_by_relations(x, &sh_basis, y, side_b)?;
            }
            return Ok(());
        }
        let grown = extend_basis(x, sh_basis.clone(), &rest_a, k + 1, floor);
        if grown.len() != k + 1 {
            return Err(Error::Genericity {
                retries: 0,
                what: "no vertex extends the shared basis".into(),
            });
        }
        let v = grown[k];
        rest_a.retain(|&y| y != v);

        if r2 > k {
            let bas2 = extend_basis(x, sh_basis.clone(), side_b, r2, floor);
            if bas2.len() != r2 {
                return Err(Error::Genericity {
                    retries: 0,
                    what: "second atom has no basis through the shared part".into(),
                });
            }
            let tri = bas2[r2 - 1];
            let others = &bas2[..r2 - 1];
            let nonbasis: Vec<usize> = side_b.iter().copied().filter(|j| !bas2.contains(j)).collect();
            // Stars are perturbations of the values the shared relations
            // would give; at those values the discriminant is the Schur
            // complement of `v`, so shrinking the noise reaches a real root.
            let stars = &bas2[k..r2 - 1];
            let sh_block = block(x, &sh_basis, &sh_basis);
            let sh_row = column(x, &sh_basis, v);
            let mut centers = Vec::with_capacity(stars.len());
            for &s in stars {
                let c = solve(&sh_block, &column(x, &sh_basis, s), PIVOT_TOL)
                    .ok_or_else(|| Error::Singular("shared basis block".into()))?;
                centers.push(sh_row.dot(&c));
            }
            let mut placed = false;
            for attempt in 0..opts.max_retries.max(1) {
                let spread = 0.5f64.powi(attempt as i32);
                for (&s, &c) in stars.iter().zip(&centers) {
                    let unit = (x[(v, v)].abs() * x[(s, s)].abs()).sqrt().max(floor);
                    set_sym(x, v, s, c + spread * unit * rng.random_range(-1.0..=1.0));
                }
                let core = block(x, others, others);
                let mut a = vec![x[(v, v)]];
                a.extend(others.iter().map(|&o| x[(v, o)]));
                let mut b: Vec<f64> = others.iter().map(|&o| x[(tri, o)]).collect();
                b.push(x[(tri, tri)]);
                let bordered = BorderedMatrix::new(core, a, b)?;
                let t = match one_entry_case_a(&bordered) {
                    Ok(CornerRoots::Real(t, _)) => t,
                    _ => continue,
                };
                match schur(x, others, v) {
                    Some(s) if s.abs() > floor => {}
                    _ => continue,
                }
                set_sym(x, v, tri, t);
                fill_by_relations(x, &bas2, v, &nonbasis)?;
                placed = true;
                break;
            }
            if !placed {
                return Err(Error::Genericity {
                    retries: opts.max_retries,
                    what: "no real root for the growth step".into(),
                });
            }
        } else {
            fill_by_relations(x, &sh_basis, v, side_b)?;
            r2 += 1;
        }
        shared.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{clique_separator_decomposition, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn glued_cliques(a: usize, k: usize, b: usize) -> Graph {
        let n = a + k + b;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let left = j < a + k;
                let right = i >= a;
                if left || right {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    fn gaussian(n: usize, r: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(n, r, |_, _| StandardNormal.sample(rng))
    }

    /// Atom data of different ranks agreeing on the separator.
    fn mixed_rank_instance(
        a: usize,
        k: usize,
        b: usize,
        r1: usize,
        r2: usize,
        rng: &mut ChaCha8Rng,
    ) -> (Graph, GPartialMatrix) {
        let g = glued_cliques(a, k, b);
        let n = g.n();
        let f1 = gaussian(a + k, r1, rng);
        let x1 = &f1 * f1.transpose();
        // Second atom: shares the separator Gram block, extends to rank r2.
        let fk = f1.rows(a, k).into_owned();
        let extra = r2.saturating_sub(r1.min(k));
        let mut f2 = DMatrix::zeros(k + b, r1 + extra);
        f2.view_mut((0, 0), (k, r1)).copy_from(&fk);
        let tail = gaussian(b, r1 + extra, rng);
        f2.view_mut((k, 0), (b, r1 + extra)).copy_from(&tail);
        let x2 = &f2 * f2.transpose();
        let mut full = DMatrix::zeros(n, n);
        full.view_mut((0, 0), (a + k, a + k)).copy_from(&x1);
        full.view_mut((a, a), (k + b, k + b)).copy_from(&x2);
        let p = GPartialMatrix::project(&g, &SymMatrix::from_dense(&full, 1e-9).unwrap()).unwrap();
        (g, p)
    }

    #[test]
    fn restores_erased_entries_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let (a, k, b) = (rng.random_range(1..4), rng.random_range(1..4), rng.random_range(1..4));
            let r = rng.random_range(1..=k + a.min(b));
            let g = glued_cliques(a, k, b);
            let f = gaussian(g.n(), r, &mut rng);
            let p = GPartialMatrix::project(&g, &SymMatrix::gram(&f)).unwrap();
            let tree = clique_separator_decomposition(&g);
            let sizes = [tree.atoms[0].len(), tree.atoms[1].len()];
            let x = clique_sum_complete(&tree, &p, sizes, &CompletionOptions::default()).unwrap();
            let rep = super::super::verify_completion(&p, &x, r, 1e-8).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn growth_step_with_unequal_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let (a, k, b) = (rng.random_range(2..5), rng.random_range(1..3), rng.random_range(2..5));
            let r1 = rng.random_range(k..=a + k);
            let r2 = rng.random_range(k..=(k + b).min(r1));
            let (g, p) = mixed_rank_instance(a, k, b, r1, r2, &mut rng);
            let tree = clique_separator_decomposition(&g);
            let sizes = [tree.atoms[0].len(), tree.atoms[1].len()];
            let x = clique_sum_complete(&tree, &p, sizes, &CompletionOptions::default()).unwrap();
            let data_rank = |atom: &Vec<usize>| float_rank(&p.restrict(atom).zero_fill(), 1e-8).unwrap();
            let expected = data_rank(&tree.atoms[0]).max(data_rank(&tree.atoms[1]));
            let rep = super::super::verify_completion(&p, &x, expected, 1e-8).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn rejects_wrong_tree() {
        let g = glued_cliques(1, 1, 1);
        let p = GPartialMatrix::project(&g, &SymMatrix::identity(3)).unwrap();
        let tree = CliqueSumTree {
            atoms: vec![vec![0, 1, 2]],
            separators: vec![],
            links: vec![],
        };
        assert!(matches!(
            clique_sum_complete(&tree, &p, [3, 3], &CompletionOptions::default()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
