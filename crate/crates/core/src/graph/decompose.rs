//! Decomposition by clique minimal separators.
//!
//! MCS-M produces a minimal elimination ordering together with the
//! vertices whose monotone adjacency generates a minimal separator of the
//! triangulation; separators that are cliques in the graph are then split
//! off in elimination order.

use serde::Serialize;

use super::Graph;

/// A graph written as iterated clique sums of its atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueSumTree {
    /// Vertex sets (sorted parent indices) of the atoms.
    pub atoms: Vec<Vec<usize>>,
    /// Tree edges: separator `k` glues `links[k].0` and `links[k].1`.
    pub separators: Vec<Vec<usize>>,
    pub links: Vec<(usize, usize)>,
}

impl CliqueSumTree {
    pub fn atom_graph(&self, g: &Graph, i: usize) -> Graph {
        g.induced(&self.atoms[i])
    }

    /// Union of the atoms' induced edge sets, as a graph on `n` vertices.
    pub fn reassemble(&self, g: &Graph) -> Graph {
        let mut edges = std::collections::BTreeSet::new();
        for atom in &self.atoms {
            for (a, &u) in atom.iter().enumerate() {
                for &v in &atom[a + 1..] {
                    if g.has_edge(u, v) {
                        edges.insert((u.min(v), u.max(v)));
                    }
                }
            }
        }
        Graph::from_edges(g.n(), edges).expect("edges come from a simple graph")
    }
}

/// Splits `g` into atoms (induced subgraphs without a clique separator)
/// glued along clique separators. Components of a disconnected graph are
/// glued along the empty clique.
pub fn clique_separator_decomposition(g: &Graph) -> CliqueSumTree {
    let mut tree = CliqueSumTree {
        atoms: Vec::new(),
        separators: Vec::new(),
        links: Vec::new(),
    };
    let mut first_atom_of_previous: Option<usize> = None;
    for comp in g.components() {
        let start = tree.atoms.len();
        let sub = g.induced(&comp);
        let (atoms, seps) = decompose_connected(&sub);
        let lift = |vs: &[usize]| -> Vec<usize> {
            let mut out: Vec<usize> = vs.iter().map(|&v| comp[v]).collect();
            out.sort_unstable();
            out
        };
        for a in &atoms {
            tree.atoms.push(lift(a));
        }
        for (i, sep) in seps.iter().enumerate() {
            // The atom split off at step i is glued to the first later atom
            // that contains its whole separator.
            let j = (i + 1..atoms.len())
                .find(|&j| sep.iter().all(|v| atoms[j].contains(v)))
                .expect("a clique separator survives in a later atom");
            tree.separators.push(lift(sep));
            tree.links.push((start + i, start + j));
        }
        if let Some(prev) = first_atom_of_previous {
            tree.separators.push(Vec::new());
            tree.links.push((prev, start));
        }
        first_atom_of_previous = Some(start);
    }
    tree
}

/// Returns atoms in split order and, for every atom except the last, the
/// separator it was split along.
fn decompose_connected(g: &Graph) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = g.n();
    let (order, madj, generators) = mcs_m(g);
    let mut alive = vec![true; n];
    let mut atoms = Vec::new();
    let mut seps = Vec::new();

    for &x in &order {
        if !generators[x] || !alive[x] {
            continue;
        }
        let sep = &madj[x];
        if sep.iter().any(|&v| !alive[v]) || !g.is_clique(sep) {
            continue;
        }
        let comp = component_avoiding(g, &alive, sep, x);
        let rest = (0..n).filter(|&v| alive[v] && !sep.contains(&v) && !comp.contains(&v)).count();
        if rest == 0 {
            continue;
        }
        let mut atom: Vec<usize> = comp.iter().chain(sep.iter()).copied().collect();
        atom.sort_unstable();
        for &v in &comp {
            alive[v] = false;
        }
        atoms.push(atom);
        let mut s = sep.clone();
        s.sort_unstable();
        seps.push(s);
    }
    atoms.push((0..n).filter(|&v| alive[v]).collect());
    (atoms, seps)
}

/// Component of `alive \ sep` containing `start`.
fn component_avoiding(g: &Graph, alive: &[bool], sep: &[usize], start: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut comp = vec![start];
    while let Some(v) = stack.pop() {
        for u in g.neighbors(v) {
            if alive[u] && !seen[u] && !sep.contains(&u) {
                seen[u] = true;
                comp.push(u);
                stack.push(u);
            }
        }
    }
    comp
}

/// MCS-M. Returns the elimination order (first eliminated first), the
/// monotone adjacency of each vertex in the minimal triangulation, and the
/// minimal-separator generators.
fn mcs_m(g: &Graph) -> (Vec<usize>, Vec<Vec<usize>>, Vec<bool>) {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    let mut madj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut generators = vec![false; n];
    let mut visit = Vec::with_capacity(n);
    let mut prev: Option<usize> = None;

    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !numbered[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .unwrap();
        if prev.is_some_and(|p| weight[v] <= p) {
            generators[v] = true;
        }
        prev = Some(weight[v]);
        numbered[v] = true;
        visit.push(v);

        let reached: Vec<usize> = (0..n)
            .filter(|&u| !numbered[u] && reachable_below(g, &numbered, &weight, v, u))
            .collect();
        for u in reached {
            weight[u] += 1;
            madj[u].push(v);
        }
    }
    visit.reverse();
    (visit, madj, generators)
}

/// Whether `target` is reachable from `source` through unnumbered
/// intermediate vertices all of weight strictly below `weight[target]`.
fn reachable_below(
    g: &Graph,
    numbered: &[bool],
    weight: &[usize],
    source: usize,
    target: usize,
) -> bool {
    if g.has_edge(source, target) {
        return true;
    }
    let bound = weight[target];
    let n = g.n();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = g
        .neighbors(source)
        .filter(|&x| !numbered[x] && weight[x] < bound)
        .collect();
    for &x in &stack {
        seen[x] = true;
    }
    while let Some(x) = stack.pop() {
        if g.has_edge(x, target) {
            return true;
        }
        for y in g.neighbors(x) {
            if !seen[y] && !numbered[y] && y != target && weight[y] < bound {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    false
}
