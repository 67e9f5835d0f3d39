//! Algorithms on the user partial order.
//!
//! Digraphs here are plain arc lists over dense vertex indices `0..n`. The
//! reachability relation is kept as a dense [`BitMatrix`], which makes the
//! comparison predicate used by the solver a single bit lookup.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::OrderError;
use crate::model::{UserId, UserPoset};

/// Dense boolean matrix with `u64` rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] |= 1 << (c % 64);
    }

    #[inline]
    pub fn unset(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / 64] &= !(1 << (c % 64));
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// `row[dst] |= row[src]`.
    pub fn or_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            return;
        }
        for w in 0..self.stride {
            let v = self.words[src * self.stride + w];
            self.words[dst * self.stride + w] |= v;
        }
    }

    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(r).iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for r in 0..self.rows {
            m.entry(&r, &self.row_ones(r).collect::<Vec<_>>());
        }
        m.finish()
    }
}

/// The relation of one user to another: `[<]`, `[>]` or `[~]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Relation {
    Lt,
    Gt,
    Inc,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Lt, Relation::Gt, Relation::Inc];

    /// Base-3 digit used by packed tuples.
    #[inline]
    pub fn digit(self) -> u64 {
        match self {
            Relation::Lt => 0,
            Relation::Gt => 1,
            Relation::Inc => 2,
        }
    }

    #[inline]
    pub fn from_digit(d: u64) -> Relation {
        match d {
            0 => Relation::Lt,
            1 => Relation::Gt,
            _ => Relation::Inc,
        }
    }

    pub fn flip(self) -> Relation {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Gt => Relation::Lt,
            Relation::Inc => Relation::Inc,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "[<]",
            Relation::Gt => "[>]",
            Relation::Inc => "[~]",
        })
    }
}

/// Relation of a user to every member of a bag, in bag order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RelationTuple(pub Vec<Relation>);

impl RelationTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Base-3 packing, coordinate `i` has weight `3^i`.
    pub fn pack(&self) -> u64 {
        self.0.iter().rev().fold(0u64, |acc, r| acc * 3 + r.digit())
    }

    pub fn unpack(mut code: u64, len: usize) -> Self {
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push(Relation::from_digit(code % 3));
            code /= 3;
        }
        RelationTuple(v)
    }
}

impl fmt::Display for RelationTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

fn check_range(n: usize, arcs: &[(usize, usize)]) -> Result<(), OrderError> {
    for &(x, y) in arcs {
        for v in [x, y] {
            if v >= n {
                return Err(OrderError::OutOfRange { vertex: v, n });
            }
        }
    }
    Ok(())
}

/// Kahn's algorithm. Self-loops and longer cycles are reported as errors.
pub fn topological_order(n: usize, arcs: &[(usize, usize)]) -> Result<Vec<usize>, OrderError> {
    check_range(n, arcs)?;
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(x, y) in arcs {
        if x == y {
            return Err(OrderError::Cycle(x));
        }
        out[x].push(y);
        indeg[y] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap_or(0);
        return Err(OrderError::Cycle(stuck));
    }
    Ok(order)
}

/// Strict reachability matrix: `(x, y)` is set iff a non-empty directed path
/// `x ~> y` exists.
pub fn reachability(n: usize, arcs: &[(usize, usize)]) -> Result<BitMatrix, OrderError> {
    let order = topological_order(n, arcs)?;
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(x, y) in arcs {
        out[x].push(y);
    }
    let mut reach = BitMatrix::new(n, n);
    for &v in order.iter().rev() {
        for &w in &out[v] {
            reach.set(v, w);
            reach.or_row_into(w, v);
        }
    }
    Ok(reach)
}

fn matrix_arcs(m: &BitMatrix) -> Vec<(usize, usize)> {
    (0..m.rows())
        .flat_map(|x| m.row_ones(x).map(move |y| (x, y)))
        .collect()
}

/// All arcs implied by directed paths of `dag`, sorted.
pub fn transitive_closure(
    n: usize,
    dag: &[(usize, usize)],
) -> Result<Vec<(usize, usize)>, OrderError> {
    Ok(matrix_arcs(&reachability(n, dag)?))
}

/// Cover relation of a strict reachability matrix: `(x, y)` survives iff no
/// `z` lies strictly between them.
pub fn cover_relation(reach: &BitMatrix) -> Vec<(usize, usize)> {
    let n = reach.rows();
    let mut covers = Vec::new();
    let mut implied = vec![0u64; n.div_ceil(64)];
    for x in 0..n {
        implied.iter_mut().for_each(|w| *w = 0);
        for z in reach.row_ones(x) {
            for (acc, w) in implied.iter_mut().zip(reach.row(z)) {
                *acc |= w;
            }
        }
        for y in reach.row_ones(x) {
            if implied[y / 64] >> (y % 64) & 1 == 0 {
                covers.push((x, y));
            }
        }
    }
    covers
}

/// The unique minimal arc set with the same closure as `dag`, sorted.
pub fn transitive_reduction(
    n: usize,
    dag: &[(usize, usize)],
) -> Result<Vec<(usize, usize)>, OrderError> {
    Ok(cover_relation(&reachability(n, dag)?))
}

/// True iff every directed 2-path `x -> y -> z` is shortcut by an arc `x -> z`.
pub fn is_transitive(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut adj = BitMatrix::new(n, n);
    for &(x, y) in arcs {
        adj.set(x, y);
    }
    arcs.iter()
        .all(|&(x, y)| adj.row_ones(y).all(|z| z == x || adj.get(x, z)))
}

pub fn compare(poset: &UserPoset, u: UserId, v: UserId) -> Result<Relation, OrderError> {
    let n = poset.num_users();
    for w in [u, v] {
        if w.0 >= n {
            return Err(OrderError::OutOfRange { vertex: w.0, n });
        }
    }
    if u == v {
        return Err(OrderError::ReflexiveComparison(u.0));
    }
    Ok(poset.relation(u, v))
}

/// `R(v, bag)`: the relation of `v` to each bag member in bag order.
pub fn relation_tuple(
    poset: &UserPoset,
    v: UserId,
    bag: &[UserId],
) -> Result<RelationTuple, OrderError> {
    if bag.contains(&v) {
        return Err(OrderError::UserInBag(v.0));
    }
    bag.iter()
        .map(|&u| compare(poset, v, u))
        .collect::<Result<Vec<_>, _>>()
        .map(RelationTuple)
}

/// Whether `barrier` separates `y` from `z`: no directed path `y ~> z` in the
/// Hasse diagram after deleting the barrier. One direction only.
pub fn separates(
    poset: &UserPoset,
    barrier: &[UserId],
    y: UserId,
    z: UserId,
) -> Result<bool, OrderError> {
    let n = poset.num_users();
    for w in [y, z].iter().chain(barrier) {
        if w.0 >= n {
            return Err(OrderError::OutOfRange { vertex: w.0, n });
        }
    }
    if y == z {
        return Err(OrderError::SeparationPrecondition(format!(
            "endpoints coincide at user {}",
            y.0
        )));
    }
    if barrier.contains(&y) || barrier.contains(&z) {
        return Err(OrderError::SeparationPrecondition(
            "endpoint lies in the barrier".into(),
        ));
    }
    let mut blocked = vec![false; n];
    for b in barrier {
        blocked[b.0] = true;
    }
    let succ = poset.cover_successors();
    let mut seen = vec![false; n];
    seen[y.0] = true;
    let mut stack = vec![y.0];
    while let Some(x) = stack.pop() {
        for &w in &succ[x] {
            if w == z.0 {
                return Ok(false);
            }
            if !blocked[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    Ok(true)
}

/// Degeneracy of the underlying undirected graph, by min-degree peeling.
/// Orientation, loops and parallel edges are ignored.
pub fn degeneracy(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(x, y) in edges {
        if x != y {
            adj[x].push(y);
            adj[y].push(x);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut best = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| degree[v])
            .expect("a vertex remains");
        best = best.max(degree[v]);
        removed[v] = true;
        for &w in &adj[v] {
            if !removed[w] {
                degree[w] -= 1;
            }
        }
    }
    best
}
