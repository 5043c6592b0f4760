use super::Graph;

/// An induced subgraph together with the parent indices of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    /// Parent vertex indices, sorted.
    pub vertices: Vec<usize>,
    pub graph: Graph,
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Size of a maximum clique.
pub fn clique_number(g: &Graph) -> usize {
    maximum_clique(g).len()
}

/// A maximum clique, found by Bron–Kerbosch enumeration with Tomita
/// pivoting and a size bound. Exponential in the worst case; intended for
/// graphs up to roughly 40 vertices.
pub fn maximum_clique(g: &Graph) -> Vec<usize> {
    let mut best = Vec::new();
    let mut current = Vec::new();
    let p: Vec<usize> = (0..g.n()).collect();
    bron_kerbosch(g, &mut current, p, Vec::new(), &mut best);
    best.sort_unstable();
    best
}

fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    best: &mut Vec<usize>,
) {
    if p.is_empty() {
        if x.is_empty() && r.len() > best.len() {
            *best = r.clone();
        }
        return;
    }
    if r.len() + p.len() <= best.len() {
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| g.has_edge(u, v)).count())
        .unwrap();
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !g.has_edge(pivot, v)).collect();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let np: Vec<usize> = p.iter().copied().filter(|&u| g.has_edge(u, v)).collect();
        let nx: Vec<usize> = x.iter().copied().filter(|&u| g.has_edge(u, v)).collect();
        r.push(v);
        bron_kerbosch(g, r, np, nx, best);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// The `k`-core: the maximal induced subgraph of minimum degree at least
/// `k`, obtained by repeatedly deleting vertices of smaller degree.
pub fn k_core(g: &Graph, k: usize) -> Subgraph {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < k).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for u in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] < k {
                    stack.push(u);
                }
            }
        }
    }
    let vertices: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let graph = g.induced(&vertices);
    Subgraph { vertices, graph }
}

/// Maximum cardinality search order, returned as an elimination order
/// (the reverse of the visiting order).
pub(crate) fn mcs_elimination_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !numbered[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .unwrap();
        numbered[v] = true;
        visit.push(v);
        for u in g.neighbors(v) {
            if !numbered[u] {
                weight[u] += 1;
            }
        }
    }
    visit.reverse();
    visit
}

/// Returns a perfect elimination ordering when `g` is chordal.
pub fn is_chordal(g: &Graph) -> Option<Vec<usize>> {
    let order = mcs_elimination_order(g);
    is_perfect_elimination_order(g, &order).then_some(order)
}

pub(crate) fn is_perfect_elimination_order(g: &Graph, order: &[usize]) -> bool {
    let n = g.n();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in order {
        let later: Vec<usize> = g.neighbors(v).filter(|&u| pos[u] > pos[v]).collect();
        if let Some(&parent) = later.iter().min_by_key(|&&u| pos[u]) {
            if later.iter().any(|&u| u != parent && !g.has_edge(parent, u)) {
                return false;
            }
        }
    }
    true
}

/// Series-parallel reduction: delete vertices of degree at most one and
/// suppress vertices of degree two (joining their neighbors, parallel
/// edges merged). Treewidth is at most 2 iff this empties the graph.
pub fn treewidth_at_most_2(g: &Graph) -> bool {
    let n = g.n();
    let mut adj: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| g.has_edge(u, v)).collect())
        .collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    loop {
        let mut progressed = false;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
            if nb.len() <= 2 {
                for &u in &nb {
                    adj[u][v] = false;
                    adj[v][u] = false;
                }
                if let [a, b] = nb[..] {
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
                alive[v] = false;
                remaining -= 1;
                progressed = true;
            }
        }
        if remaining == 0 {
            return true;
        }
        if !progressed {
            return false;
        }
    }
}

/// Upper bound on treewidth from the min-fill elimination heuristic
/// (ties broken by degree, then by index). This is a heuristic bound, not
/// exact treewidth; it is exact on chordal graphs.
pub fn treewidth_upper_bound(g: &Graph) -> usize {
    let n = g.n();
    let mut adj: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| g.has_edge(u, v)).collect())
        .collect();
    let mut alive = vec![true; n];
    let mut width = 0;
    for _ in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let nb: Vec<usize> = (0..n).filter(|&u| alive[u] && adj[v][u]).collect();
            let mut fill = 0;
            for (i, &a) in nb.iter().enumerate() {
                fill += nb[i + 1..].iter().filter(|&&b| !adj[a][b]).count();
            }
            let key = (fill, nb.len(), v);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let (_, deg, v) = best.unwrap();
        width = width.max(deg);
        let nb: Vec<usize> = (0..n).filter(|&u| alive[u] && adj[v][u]).collect();
        for &a in &nb {
            for &b in &nb {
                if a != b {
                    adj[a][b] = true;
                }
            }
        }
        alive[v] = false;
    }
    width
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Generator;

    fn gen(g: Generator) -> Graph {
        g.build().unwrap()
    }

    /// Largest clique by checking every vertex subset.
    fn brute_clique_number(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|mask| {
                let vs: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
                g.is_clique(&vs)
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn clique_numbers() {
        assert_eq!(clique_number(&gen(Generator::Complete(4))), 4);
        assert_eq!(clique_number(&gen(Generator::Bipartite(3, 3))), 2);
        assert_eq!(clique_number(&gen(Generator::Figure1)), 2);
        assert_eq!(clique_number(&gen(Generator::Wheel(6))), 3);
        assert_eq!(clique_number(&Graph::empty(3)), 1);
    }

    #[test]
    fn figure1_has_no_triangle() {
        let g = gen(Generator::Figure1);
        for a in 0..10 {
            for b in a + 1..10 {
                for c in b + 1..10 {
                    assert!(!g.is_clique(&[a, b, c]));
                }
            }
        }
        assert_eq!(brute_clique_number(&g), 2);
    }

    #[test]
    fn k_cores() {
        assert!(k_core(&gen(Generator::Figure1), 3).is_empty());
        assert_eq!(k_core(&gen(Generator::Figure1), 2).vertices.len(), 10);
        let k4 = k_core(&gen(Generator::Complete(4)), 3);
        assert_eq!(k4.graph, gen(Generator::Complete(4)));
        assert!(k_core(&gen(Generator::Path(5)), 2).is_empty());
    }

    #[test]
    fn chordality() {
        assert!(is_chordal(&gen(Generator::Complete(4))).is_some());
        assert!(is_chordal(&gen(Generator::Cycle(4))).is_none());
        assert!(is_chordal(&gen(Generator::Path(7))).is_some());
        assert!(is_chordal(&gen(Generator::Wheel(5))).is_none());
        assert!(is_chordal(&gen(Generator::Figure1)).is_none());
    }

    #[test]
    fn series_parallel_reduction() {
        assert!(treewidth_at_most_2(&gen(Generator::Cycle(6))));
        assert!(!treewidth_at_most_2(&gen(Generator::Complete(4))));
        assert!(treewidth_at_most_2(&gen(Generator::Bipartite(2, 3))));
        assert!(!treewidth_at_most_2(&gen(Generator::Bipartite(3, 3))));
        assert!(!treewidth_at_most_2(&gen(Generator::Figure1)));
        assert!(treewidth_at_most_2(&gen(Generator::Path(4))));
    }

    #[test]
    fn treewidth_bounds() {
        assert_eq!(treewidth_upper_bound(&gen(Generator::Complete(4))), 3);
        assert_eq!(treewidth_upper_bound(&gen(Generator::Path(9))), 1);
        assert_eq!(treewidth_upper_bound(&gen(Generator::Cycle(7))), 2);
        assert_eq!(treewidth_upper_bound(&gen(Generator::Figure1)), 3);
        // K_{m,n} has treewidth min(m, n); the heuristic reaches it.
        assert_eq!(treewidth_upper_bound(&gen(Generator::Bipartite(3, 5))), 3);
        assert_eq!(treewidth_upper_bound(&gen(Generator::Bipartite(5, 5))), 5);
        for m in 2..=5 {
            for n in m..=9 {
                let tw = treewidth_upper_bound(&gen(Generator::Bipartite(m, n)));
                assert!(tw <= m + 1);
                assert_eq!(tw, m);
            }
        }
    }
}
