#![allow(dead_code)]

use completion_rank::completion::BorderedMatrix;
use completion_rank::graph::{Generator, Graph};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Random edges between parts `0..m` and `m..m+n`, at least one.
pub fn random_bipartite_pattern(m: usize, n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    loop {
        let mut edges = Vec::new();
        for i in 0..m {
            for j in m..m + n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        if !edges.is_empty() {
            return Graph::from_edges(m + n, edges).unwrap();
        }
    }
}

/// Two cliques `A ∪ K` and `K ∪ B` sharing `K`.
pub fn glued_cliques(a: usize, k: usize, b: usize) -> Graph {
    let n = a + k + b;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if j < a + k || i >= a {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// A small graph without clique separators.
pub fn random_atom(rng: &mut ChaCha8Rng) -> Graph {
    let g = match rng.random_range(0..4) {
        0 => Generator::Complete(rng.random_range(2..=7)),
        1 => Generator::Cycle(rng.random_range(4..=7)),
        2 => Generator::Bipartite(2, rng.random_range(2..=5)),
        _ => Generator::Bipartite(3, rng.random_range(3..=4)),
    };
    g.build().unwrap()
}

fn random_clique_in(g: &Graph, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match size {
        1 => vec![rng.random_range(0..g.n())],
        _ => {
            if g.is_complete() {
                let mut vs: Vec<usize> = (0..g.n()).collect();
                for i in (1..vs.len()).rev() {
                    vs.swap(i, rng.random_range(0..=i));
                }
                vs.truncate(size);
                vs
            } else {
                let (u, v) = g.edges()[rng.random_range(0..g.edge_count())];
                vec![u, v]
            }
        }
    }
}

/// Iterated clique sum of `atoms`, each glued to a random earlier one
/// along a clique of size one or two. Returns the graph and the vertex
/// sets of the atoms in it.
pub fn clique_sum_of(atoms: &[Graph], rng: &mut ChaCha8Rng) -> (Graph, Vec<Vec<usize>>) {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut placed: Vec<Vec<usize>> = Vec::new();
    let mut n = 0;
    for atom in atoms {
        let map: Vec<usize> = if placed.is_empty() {
            (0..atom.n()).collect()
        } else {
            let host = rng.random_range(0..placed.len());
            let host_graph = &atoms[host];
            let max_k = 2.min(atom.n() - 1).min(host_graph.n() - 1);
            let k = rng.random_range(1..=max_k);
            let in_host = random_clique_in(host_graph, k, rng);
            let in_atom = random_clique_in(atom, k, rng);
            let mut map = vec![usize::MAX; atom.n()];
            for (&ha, &aa) in in_host.iter().zip(&in_atom) {
                map[aa] = placed[host][ha];
            }
            for slot in map.iter_mut().filter(|s| **s == usize::MAX) {
                *slot = n;
                n += 1;
            }
            map
        };
        if placed.is_empty() {
            n = atom.n();
        }
        for &(u, v) in atom.edges() {
            let (a, b) = (map[u], map[v]);
            edges.push((a.min(b), a.max(b)));
        }
        placed.push(map);
    }
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::from_edges(n, edges).unwrap();
    let sets = placed
        .into_iter()
        .map(|mut s| {
            s.sort_unstable();
            s
        })
        .collect();
    (g, sets)
}

/// Valid input for the unique-corner case: invertible upper-left block
/// and a bottom-right block of rank exactly `n`.
pub fn case_b_instance(n: usize, rng: &mut ChaCha8Rng) -> BorderedMatrix {
    let f = gaussian(n, n, rng);
    let core = &f * f.transpose() + DMatrix::identity(n, n) * 0.5;
    let a: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(rng)).collect();
    let bv = gaussian(n, 1, rng);
    let minv_b = core.clone().lu().solve(&bv).unwrap();
    let mut b: Vec<f64> = bv.iter().copied().collect();
    b.push(bv.dot(&minv_b));
    let mut a = a;
    // Keep the upper-left block comfortably invertible.
    let minv_a = core.clone().lu().solve(&DMatrix::from_column_slice(n, 1, &a[1..])).unwrap();
    let schur = a[0] - minv_a.iter().zip(&a[1..]).map(|(x, y)| x * y).sum::<f64>();
    if schur.abs() < 0.5 {
        a[0] += if schur >= 0.0 { 1.0 } else { -1.0 };
    }
    BorderedMatrix::new(core, a, b).unwrap()
}

/// Erase-and-restore instance for the both-rank-`n` case: the Gram matrix
/// of `n + 2` points in `ℝⁿ` with its corner removed. Returns the erased
/// value as well.
pub fn case_c_instance(n: usize, rng: &mut ChaCha8Rng) -> (BorderedMatrix, f64) {
    let l = gaussian(n + 2, n, rng);
    let g = &l * l.transpose();
    let core = g.view((1, 1), (n, n)).into_owned();
    let a: Vec<f64> = (0..=n).map(|i| g[(0, i)]).collect();
    let b: Vec<f64> = (1..=n + 1).map(|i| g[(i, n + 1)]).collect();
    (BorderedMatrix::new(core, a, b).unwrap(), g[(0, n + 1)])
}

pub fn det(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

/// `|det P(t₀)|` and `|d/dt det P(t)|` at `t₀`, relative to
/// `|det M| · (1 + ‖P‖∞)²`. The derivative is a central difference, exact
/// for a quadratic up to rounding.
pub fn double_root_residuals(p: &BorderedMatrix, t0: f64) -> (f64, f64) {
    let scale = det(&p.core).abs() * (1.0 + p.assemble(t0).amax()).powi(2);
    let h = 1e-3 * (1.0 + t0.abs());
    let value = det(&p.assemble(t0)).abs() / scale;
    let slope = (det(&p.assemble(t0 + h)) - det(&p.assemble(t0 - h))).abs() / (2.0 * h) / scale;
    (value, slope)
}

/// Singular values above `tol` relative to the largest.
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > tol * top.max(f64::MIN_POSITIVE)).count()
}
