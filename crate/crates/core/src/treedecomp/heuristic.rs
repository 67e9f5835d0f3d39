//! Elimination-ordering decompositions: min-degree and min-fill greedy
//! heuristics, and an exact branch-and-bound search for small graphs.
//! Ties always go to the lowest vertex id.

use std::collections::HashMap;

use super::{Bag, TreeDecomposition};
use crate::error::TdError;
use crate::order::BitMatrix;

/// Largest graph accepted by [`Strategy::ExactSmall`].
pub const EXACT_VERTEX_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    MinDegree,
    MinFill,
    ExactSmall,
}

struct EliminationGraph {
    adj: BitMatrix,
    alive: Vec<bool>,
    degree: Vec<usize>,
}

impl EliminationGraph {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = BitMatrix::new(n, n);
        for &(x, y) in edges {
            if x != y {
                adj.set(x, y);
                adj.set(y, x);
            }
        }
        let degree = (0..n).map(|v| adj.row_ones(v).count()).collect();
        EliminationGraph {
            adj,
            alive: vec![true; n],
            degree,
        }
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adj.row_ones(v).collect()
    }

    fn fill(&self, v: usize) -> usize {
        let nb = self.neighbors(v);
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            missing += nb[i + 1..].iter().filter(|&&b| !self.adj.get(a, b)).count();
        }
        missing
    }

    /// Removes `v`, turning its neighborhood into a clique. Returns the
    /// neighborhood.
    fn eliminate(&mut self, v: usize) -> Vec<usize> {
        let nb = self.neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !self.adj.get(a, b) {
                    self.adj.set(a, b);
                    self.adj.set(b, a);
                    self.degree[a] += 1;
                    self.degree[b] += 1;
                }
            }
        }
        for &a in &nb {
            self.adj.unset(a, v);
            self.degree[a] -= 1;
        }
        for &a in &nb {
            self.adj.unset(v, a);
        }
        self.alive[v] = false;
        nb
    }
}

fn greedy_order(n: usize, edges: &[(usize, usize)], fill_score: bool) -> Vec<usize> {
    let mut g = EliminationGraph::new(n, edges);
    let mut score: Vec<usize> = if fill_score {
        (0..n).map(|v| g.fill(v)).collect()
    } else {
        Vec::new()
    };
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| g.alive[v])
            .min_by_key(|&v| {
                if fill_score {
                    (score[v], g.degree[v])
                } else {
                    (g.degree[v], 0)
                }
            })
            .expect("a vertex remains");
        let nb = g.eliminate(v);
        order.push(v);
        if fill_score {
            let mut touched: Vec<usize> = nb.clone();
            for &a in &nb {
                touched.extend(g.adj.row_ones(a));
            }
            touched.sort_unstable();
            touched.dedup();
            for w in touched {
                score[w] = g.fill(w);
            }
        }
    }
    order
}

/// Decomposition whose bags are `{v} ∪ N+(v)` along the elimination of
/// `order`. Bag `i` belongs to `order[n - 1 - i]`, so bag 0 is a root.
pub fn td_from_elimination_order(
    n: usize,
    edges: &[(usize, usize)],
    order: &[usize],
) -> TreeDecomposition {
    assert_eq!(order.len(), n, "elimination order must list every vertex");
    if n == 0 {
        return TreeDecomposition {
            bags: vec![Bag::default()],
            edges: Vec::new(),
        };
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let bag_of = |v: usize| n - 1 - pos[v];
    let mut g = EliminationGraph::new(n, edges);
    let mut bags = vec![Bag::default(); n];
    let mut tree_edges = Vec::new();
    let mut roots = Vec::new();
    for &v in order {
        let nb = g.eliminate(v);
        match nb.iter().min_by_key(|&&w| pos[w]) {
            Some(&parent) => tree_edges.push((bag_of(parent), bag_of(v))),
            None => roots.push(bag_of(v)),
        }
        let mut members = nb;
        members.push(v);
        bags[bag_of(v)] = Bag::from_indices(members);
    }
    roots.sort_unstable();
    for w in roots.windows(2) {
        tree_edges.push((w[0], w[1]));
    }
    tree_edges.sort_unstable();
    TreeDecomposition {
        bags,
        edges: tree_edges,
    }
}

fn mask_degeneracy(adj: &[u32], mut remaining: u32) -> usize {
    let mut best = 0;
    while remaining != 0 {
        let mut min_deg = usize::MAX;
        let mut pick = 0;
        let mut m = remaining;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let d = (adj[v] & remaining).count_ones() as usize;
            if d < min_deg {
                min_deg = d;
                pick = v;
            }
        }
        best = best.max(min_deg);
        remaining &= !(1 << pick);
    }
    best
}

fn mask_eliminate(adj: &mut [u32], v: usize) {
    let nb = adj[v];
    let mut m = nb;
    while m != 0 {
        let u = m.trailing_zeros() as usize;
        m &= m - 1;
        adj[u] |= nb & !(1 << u);
        adj[u] &= !(1 << v);
    }
    adj[v] = 0;
}

struct ExactSearch {
    best: usize,
    best_order: Vec<usize>,
    path: Vec<usize>,
    seen: HashMap<u32, usize>,
}

impl ExactSearch {
    fn dfs(&mut self, adj: &[u32], remaining: u32, cur: usize) {
        if cur >= self.best {
            return;
        }
        let left = remaining.count_ones() as usize;
        if left <= cur + 1 {
            self.best = cur;
            self.best_order = self.path.clone();
            let mut m = remaining;
            while m != 0 {
                self.best_order.push(m.trailing_zeros() as usize);
                m &= m - 1;
            }
            return;
        }
        if cur.max(mask_degeneracy(adj, remaining)) >= self.best {
            return;
        }
        match self.seen.get(&remaining) {
            Some(&w) if w <= cur => return,
            _ => {
                self.seen.insert(remaining, cur);
            }
        }
        let mut candidates = Vec::new();
        let mut m = remaining;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let nb = adj[v];
            let mut clique = true;
            let mut rest = nb;
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if (adj[u] | (1 << u)) & nb != nb {
                    clique = false;
                    break;
                }
            }
            if clique {
                // Eliminating a simplicial vertex never hurts.
                candidates = vec![v];
                break;
            }
            candidates.push(v);
        }
        for v in candidates {
            let deg = adj[v].count_ones() as usize;
            let width = cur.max(deg);
            if width >= self.best {
                continue;
            }
            let mut next = adj.to_vec();
            mask_eliminate(&mut next, v);
            self.path.push(v);
            self.dfs(&next, remaining & !(1 << v), width);
            self.path.pop();
        }
    }
}

fn exact_order(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![0u32; n];
    for &(x, y) in edges {
        if x != y {
            adj[x] |= 1 << y;
            adj[y] |= 1 << x;
        }
    }
    let upper = greedy_order(n, edges, true);
    let upper_width = order_width(n, edges, &upper);
    let mut search = ExactSearch {
        best: upper_width,
        best_order: upper,
        path: Vec::new(),
        seen: HashMap::new(),
    };
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    search.dfs(&adj, all, 0);
    search.best_order
}

/// Width induced by eliminating along `order`.
fn order_width(n: usize, edges: &[(usize, usize)], order: &[usize]) -> usize {
    let mut g = EliminationGraph::new(n, edges);
    order
        .iter()
        .map(|&v| g.eliminate(v).len())
        .max()
        .unwrap_or(0)
}

pub fn elimination_order(
    n: usize,
    edges: &[(usize, usize)],
    strategy: Strategy,
) -> Result<Vec<usize>, TdError> {
    Ok(match strategy {
        Strategy::MinDegree => greedy_order(n, edges, false),
        Strategy::MinFill => greedy_order(n, edges, true),
        Strategy::ExactSmall => {
            if n > EXACT_VERTEX_CAP {
                return Err(TdError::ExactTooLarge {
                    n,
                    cap: EXACT_VERTEX_CAP,
                });
            }
            exact_order(n, edges)
        }
    })
}

/// Tree decomposition of the graph on `n` vertices with the given edges
/// (orientation ignored).
pub fn decompose(
    n: usize,
    edges: &[(usize, usize)],
    strategy: Strategy,
) -> Result<TreeDecomposition, TdError> {
    let order = elimination_order(n, edges, strategy)?;
    Ok(td_from_elimination_order(n, edges, &order))
}
