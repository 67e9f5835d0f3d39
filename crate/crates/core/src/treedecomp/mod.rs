//! Tree decompositions of the (underlying undirected graph of the) Hasse
//! diagram: validation, construction, nice form and file I/O.

mod heuristic;
mod io;
mod nice;

use std::fmt;
use std::ops::Deref;

use crate::error::TdError;
use crate::model::{UserId, UserPoset};

pub use heuristic::{
    decompose, elimination_order, td_from_elimination_order, Strategy, EXACT_VERTEX_CAP,
};
pub use io::{parse_td, write_td};
pub use nice::{to_nice, validate_nice, NiceKind, NiceNode, NiceTreeDecomposition};

/// Users of one node, ascending and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bag(Vec<UserId>);

impl Bag {
    pub fn new(mut users: Vec<UserId>) -> Self {
        users.sort_unstable();
        users.dedup();
        Bag(users)
    }

    pub fn from_indices(users: impl IntoIterator<Item = usize>) -> Self {
        Bag::new(users.into_iter().map(UserId).collect())
    }

    pub fn users(&self) -> &[UserId] {
        &self.0
    }

    /// Index of `u` in bag order.
    pub fn position(&self, u: UserId) -> Option<usize> {
        self.0.binary_search(&u).ok()
    }

    pub fn contains_user(&self, u: UserId) -> bool {
        self.position(u).is_some()
    }

    pub fn is_subset(&self, other: &Bag) -> bool {
        self.0.iter().all(|u| other.contains_user(*u))
    }

    pub fn with(&self, u: UserId) -> Bag {
        let mut v = self.0.clone();
        v.push(u);
        Bag::new(v)
    }

    pub fn without(&self, u: UserId) -> Bag {
        Bag(self.0.iter().copied().filter(|&x| x != u).collect())
    }
}

impl Deref for Bag {
    type Target = [UserId];

    fn deref(&self) -> &[UserId] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    pub bags: Vec<Bag>,
    /// Unordered pairs of bag indices.
    pub edges: Vec<(usize, usize)>,
}

/// Width of a decomposition: largest bag size minus one (zero when every
/// bag is empty).
pub fn width(td: &TreeDecomposition) -> Result<usize, TdError> {
    td.bags
        .iter()
        .map(|b| b.len())
        .max()
        .map(|m| m.saturating_sub(1))
        .ok_or(TdError::Empty)
}

impl TreeDecomposition {
    pub fn width(&self) -> Result<usize, TdError> {
        width(self)
    }
}

/// Cover-arc edges of the Hasse diagram as plain index pairs.
pub fn hasse_edges(poset: &UserPoset) -> Vec<(usize, usize)> {
    poset
        .cover_arcs()
        .iter()
        .map(|&(a, b)| (a.0, b.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdDiagnostic {
    NoBags,
    UserOutOfRange {
        bag: usize,
        user: usize,
    },
    BadTreeEdge(usize, usize),
    NotATree {
        bags: usize,
        edges: usize,
    },
    Disconnected,
    /// Definition condition 1.
    Uncovered(usize),
    /// Condition 2.
    EdgeNotCovered(usize, usize),
    /// Condition 3.
    OccurrenceNotConnected(usize),
}

impl fmt::Display for TdDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdDiagnostic::NoBags => f.write_str("decomposition has no bags"),
            TdDiagnostic::UserOutOfRange { bag, user } => {
                write!(f, "bag {bag} contains out-of-range vertex {user}")
            }
            TdDiagnostic::BadTreeEdge(a, b) => {
                write!(f, "tree edge {a}-{b} is a loop or names a missing bag")
            }
            TdDiagnostic::NotATree { bags, edges } => {
                write!(f, "{edges} tree edges over {bags} bags cannot form a tree")
            }
            TdDiagnostic::Disconnected => f.write_str("tree edges do not connect all bags"),
            TdDiagnostic::Uncovered(v) => write!(f, "vertex {v} is in no bag"),
            TdDiagnostic::EdgeNotCovered(x, y) => {
                write!(f, "no bag contains both ends of edge {x}-{y}")
            }
            TdDiagnostic::OccurrenceNotConnected(v) => {
                write!(
                    f,
                    "bags containing vertex {v} do not induce a connected subtree"
                )
            }
        }
    }
}

/// Tree shape plus the connected-occurrence condition; needs no graph.
pub(crate) fn validate_structure(td: &TreeDecomposition, n: Option<usize>) -> Vec<TdDiagnostic> {
    let mut out = Vec::new();
    let m = td.bags.len();
    if m == 0 {
        out.push(TdDiagnostic::NoBags);
        return out;
    }
    if let Some(n) = n {
        for (i, b) in td.bags.iter().enumerate() {
            for u in b.iter().filter(|u| u.0 >= n) {
                out.push(TdDiagnostic::UserOutOfRange { bag: i, user: u.0 });
            }
        }
    }
    let mut adj = vec![Vec::new(); m];
    let mut shape_ok = true;
    for &(a, b) in &td.edges {
        if a >= m || b >= m || a == b {
            out.push(TdDiagnostic::BadTreeEdge(a, b));
            shape_ok = false;
        } else {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    if td.edges.len() + 1 != m {
        out.push(TdDiagnostic::NotATree {
            bags: m,
            edges: td.edges.len(),
        });
        shape_ok = false;
    }
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        out.push(TdDiagnostic::Disconnected);
        shape_ok = false;
    }
    if !shape_ok {
        return out;
    }
    // In a tree, a node subset is connected iff it spans |subset| - 1 edges.
    let universe = td
        .bags
        .iter()
        .flat_map(|b| b.iter().map(|u| u.0 + 1))
        .max()
        .unwrap_or(0);
    let mut nodes = vec![0usize; universe];
    let mut inner = vec![0usize; universe];
    for b in &td.bags {
        for u in b.iter() {
            nodes[u.0] += 1;
        }
    }
    for &(a, b) in &td.edges {
        for u in td.bags[a].iter().filter(|u| td.bags[b].contains_user(**u)) {
            inner[u.0] += 1;
        }
    }
    for v in 0..universe {
        if nodes[v] > 0 && inner[v] + 1 != nodes[v] {
            out.push(TdDiagnostic::OccurrenceNotConnected(v));
        }
    }
    out
}

/// Checks a decomposition of the graph on `n` vertices with the given edges
/// (orientation ignored). Empty iff valid.
pub fn validate_decomposition(
    n: usize,
    edges: &[(usize, usize)],
    td: &TreeDecomposition,
) -> Vec<TdDiagnostic> {
    let mut out = validate_structure(td, Some(n));
    if td.bags.is_empty() {
        return out;
    }
    let mut covered = vec![false; n];
    for b in &td.bags {
        for u in b.iter().filter(|u| u.0 < n) {
            covered[u.0] = true;
        }
    }
    out.extend((0..n).filter(|&v| !covered[v]).map(TdDiagnostic::Uncovered));
    for &(x, y) in edges {
        let (ux, uy) = (UserId(x), UserId(y));
        if !td
            .bags
            .iter()
            .any(|b| b.contains_user(ux) && b.contains_user(uy))
        {
            out.push(TdDiagnostic::EdgeNotCovered(x, y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td(bags: &[&[usize]], edges: &[(usize, usize)]) -> TreeDecomposition {
        TreeDecomposition {
            bags: bags
                .iter()
                .map(|b| Bag::from_indices(b.iter().copied()))
                .collect(),
            edges: edges.to_vec(),
        }
    }

    // PrepC=0, AppC=1, PrepP=2, AppP=3 with the five constraint edges.
    const EXPENSES_EDGES: [(usize, usize); 5] = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)];

    #[test]
    fn two_bag_decomposition_of_the_constraint_graph() {
        let t = td(&[&[1, 0, 2], &[1, 3, 2]], &[(0, 1)]);
        assert!(validate_decomposition(4, &EXPENSES_EDGES, &t).is_empty());
        assert_eq!(width(&t), Ok(2));
    }

    #[test]
    fn uncovered_vertex() {
        let t = td(&[&[1, 0, 2], &[1, 2]], &[(0, 1)]);
        let d = validate_decomposition(4, &EXPENSES_EDGES, &t);
        assert!(d.contains(&TdDiagnostic::Uncovered(3)));
        assert!(d.contains(&TdDiagnostic::EdgeNotCovered(1, 3)));
    }

    #[test]
    fn occurrence_must_be_connected() {
        let t = td(&[&[0, 1], &[1, 2], &[2, 0]], &[(0, 1), (1, 2)]);
        let d = validate_decomposition(3, &[(0, 1), (1, 2)], &t);
        assert_eq!(d, vec![TdDiagnostic::OccurrenceNotConnected(0)]);
        assert!(d[0].to_string().contains("vertex 0"));
    }

    #[test]
    fn tree_shape_is_checked() {
        let t = td(&[&[0], &[1], &[2]], &[(0, 1)]);
        let d = validate_decomposition(3, &[], &t);
        assert!(d.contains(&TdDiagnostic::NotATree { bags: 3, edges: 1 }));
        let t = td(&[&[0], &[1]], &[(0, 0)]);
        assert!(validate_decomposition(2, &[], &t).contains(&TdDiagnostic::BadTreeEdge(0, 0)));
        assert_eq!(
            validate_decomposition(0, &[], &TreeDecomposition::default()),
            vec![TdDiagnostic::NoBags]
        );
    }

    #[test]
    fn width_edge_cases() {
        assert_eq!(width(&TreeDecomposition::default()), Err(TdError::Empty));
        assert_eq!(width(&td(&[&[4]], &[])), Ok(0));
        assert_eq!(width(&td(&[&[]], &[])), Ok(0));
    }

    #[test]
    fn bag_helpers() {
        let b = Bag::from_indices([3, 1, 3, 2]);
        assert_eq!(b.users(), &[UserId(1), UserId(2), UserId(3)]);
        assert_eq!(b.position(UserId(3)), Some(2));
        assert_eq!(
            b.without(UserId(2)).with(UserId(0)),
            Bag::from_indices([0, 1, 3])
        );
    }
}
