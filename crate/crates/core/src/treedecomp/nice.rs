//! Nice tree decompositions: leaf, introduce, forget and binary join nodes.
//!
//! Construction: the input is first made smooth. Adjacent bags where one
//! contains the other are merged, every bag is padded to the maximum size
//! from its neighbors, and bags are inserted between neighbors until any
//! two adjacent bags differ in exactly one vertex each way. A smooth
//! decomposition of width `k` has `n - k` bags, so each tree edge becoming
//! one forget and one introduce keeps the total under `4n`. The tree is
//! rooted at (the survivor of) bag 0; leaves hold their whole bag.

use super::{validate_decomposition, validate_structure, Bag, TdDiagnostic, TreeDecomposition};
use crate::error::TdError;
use crate::model::UserId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NiceKind {
    Leaf,
    Introduce(UserId),
    Forget(UserId),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub bag: Bag,
    pub kind: NiceKind,
    pub children: Vec<usize>,
}

/// Nodes are stored in post-order: every child index is smaller than its
/// parent's, and the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Counts of (leaf, introduce, forget, join) nodes.
    pub fn kind_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for n in &self.nodes {
            c[match n.kind {
                NiceKind::Leaf => 0,
                NiceKind::Introduce(_) => 1,
                NiceKind::Forget(_) => 2,
                NiceKind::Join => 3,
            }] += 1;
        }
        c
    }

    pub fn as_tree_decomposition(&self) -> TreeDecomposition {
        TreeDecomposition {
            bags: self.nodes.iter().map(|n| n.bag.clone()).collect(),
            edges: self
                .nodes
                .iter()
                .enumerate()
                .flat_map(|(i, n)| n.children.iter().map(move |&c| (c, i)))
                .collect(),
        }
    }

    fn push(&mut self, bag: Bag, kind: NiceKind, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            bag,
            kind,
            children,
        });
        self.nodes.len() - 1
    }
}

/// Merges tree-adjacent bags where one is a subset of the other. Returns the
/// compressed decomposition and the new index of `root`'s survivor.
fn compress(td: &TreeDecomposition, root: usize) -> (TreeDecomposition, usize) {
    let m = td.bags.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(a, b) in &td.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut alive = vec![true; m];
    // Ascending scan; a merged bag hands its neighbors to the absorber.
    let mut changed = true;
    while changed {
        changed = false;
        for a in 0..m {
            if !alive[a] {
                continue;
            }
            let absorber = adj[a]
                .iter()
                .copied()
                .find(|&b| td.bags[a].is_subset(&td.bags[b]));
            if let Some(b) = absorber {
                let moved = std::mem::take(&mut adj[a]);
                for &c in &moved {
                    adj[c].retain(|&x| x != a);
                    if c != b {
                        adj[c].push(b);
                        adj[b].push(c);
                    }
                }
                alive[a] = false;
                changed = true;
            }
        }
    }
    let mut index = vec![usize::MAX; m];
    let mut bags = Vec::new();
    for a in (0..m).filter(|&a| alive[a]) {
        index[a] = bags.len();
        bags.push(td.bags[a].clone());
    }
    let mut edges = Vec::new();
    for a in (0..m).filter(|&a| alive[a]) {
        for &b in &adj[a] {
            if a < b {
                edges.push((index[a], index[b]));
            }
        }
    }
    edges.sort_unstable();
    // An absorbed root moves to the first surviving superset.
    let root = if alive[root] {
        index[root]
    } else {
        bags.iter()
            .position(|b| td.bags[root].is_subset(b))
            .expect("an absorbed bag is contained in a surviving bag")
    };
    (TreeDecomposition { bags, edges }, root)
}

fn smooth(td: &TreeDecomposition) -> (TreeDecomposition, usize) {
    let (mut td, mut root) = compress(td, 0);
    let full = td.bags.iter().map(|b| b.len()).max().unwrap_or(0);
    loop {
        let mut changed = false;
        for i in 0..td.edges.len() {
            let (a, b) = td.edges[i];
            for (x, y) in [(a, b), (b, a)] {
                if td.bags[x].len() < full {
                    if let Some(&u) = td.bags[y].iter().find(|u| !td.bags[x].contains_user(**u)) {
                        td.bags[x] = td.bags[x].with(u);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
        (td, root) = compress(&td, root);
    }
    let mut edges = Vec::with_capacity(td.edges.len());
    for &(a, b) in &td.edges.clone() {
        let mut cur = a;
        loop {
            let out: Vec<UserId> = td.bags[cur]
                .iter()
                .copied()
                .filter(|u| !td.bags[b].contains_user(*u))
                .collect();
            if out.len() <= 1 {
                break;
            }
            let inn = td.bags[b]
                .iter()
                .copied()
                .find(|u| !td.bags[cur].contains_user(*u))
                .expect("equal sizes");
            td.bags.push(td.bags[cur].without(out[0]).with(inn));
            edges.push((cur, td.bags.len() - 1));
            cur = td.bags.len() - 1;
        }
        edges.push((cur, b));
    }
    td.edges = edges;
    (td, root)
}

/// Converts a valid decomposition into nice form of the same width.
pub fn to_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition, TdError> {
    let problems = validate_structure(td, None);
    if !problems.is_empty() {
        return Err(TdError::Invalid(
            problems.iter().map(ToString::to_string).collect(),
        ));
    }
    let (td, root) = smooth(td);
    let m = td.bags.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(a, b) in &td.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    // Iterative post-order over the rooted bag tree.
    let mut parent = vec![usize::MAX; m];
    let mut order = Vec::with_capacity(m);
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut nice = NiceTreeDecomposition { nodes: Vec::new() };
    let mut top = vec![usize::MAX; m];
    for &b in order.iter().rev() {
        let bag = &td.bags[b];
        let children: Vec<usize> = adj[b]
            .iter()
            .copied()
            .filter(|&c| parent[c] == b && c != b)
            .collect();
        if children.is_empty() {
            top[b] = nice.push(bag.clone(), NiceKind::Leaf, Vec::new());
            continue;
        }
        let mut branches = Vec::with_capacity(children.len());
        for &c in &children {
            let mut cur = top[c];
            for &u in td.bags[c].iter().filter(|u| !bag.contains_user(**u)) {
                let next = nice.nodes[cur].bag.without(u);
                cur = nice.push(next, NiceKind::Forget(u), vec![cur]);
            }
            for &u in bag.iter().filter(|u| !td.bags[c].contains_user(**u)) {
                let next = nice.nodes[cur].bag.with(u);
                cur = nice.push(next, NiceKind::Introduce(u), vec![cur]);
            }
            branches.push(cur);
        }
        let mut cur = branches[0];
        for &br in &branches[1..] {
            cur = nice.push(bag.clone(), NiceKind::Join, vec![cur, br]);
        }
        top[b] = cur;
    }
    debug_assert_eq!(top[root], nice.root());
    Ok(nice)
}

/// Node-typing rules plus every decomposition condition against the graph.
pub fn validate_nice(
    n: usize,
    edges: &[(usize, usize)],
    ntd: &NiceTreeDecomposition,
) -> Vec<String> {
    let mut out = Vec::new();
    if ntd.nodes.is_empty() {
        out.push(TdDiagnostic::NoBags.to_string());
        return out;
    }
    let mut has_parent = vec![false; ntd.len()];
    for (i, node) in ntd.nodes.iter().enumerate() {
        if node.children.iter().any(|&c| c >= i) {
            out.push(format!(
                "node {i} has a child that is not earlier in post-order"
            ));
            continue;
        }
        for &c in &node.children {
            if has_parent[c] {
                out.push(format!("node {c} has two parents"));
            }
            has_parent[c] = true;
        }
        let child = |j: usize| &ntd.nodes[node.children[j]].bag;
        let ok = match node.kind {
            NiceKind::Leaf => node.children.is_empty(),
            NiceKind::Introduce(u) => {
                node.children.len() == 1
                    && !child(0).contains_user(u)
                    && child(0).with(u) == node.bag
            }
            NiceKind::Forget(u) => {
                node.children.len() == 1
                    && child(0).contains_user(u)
                    && child(0).without(u) == node.bag
            }
            NiceKind::Join => {
                node.children.len() == 2 && *child(0) == node.bag && *child(1) == node.bag
            }
        };
        if !ok {
            out.push(format!("node {i} violates the {:?} shape", node.kind));
        }
    }
    if let Some(i) = has_parent[..ntd.root()].iter().position(|p| !p) {
        out.push(format!("node {i} is detached from the root"));
    }
    out.extend(
        validate_decomposition(n, edges, &ntd.as_tree_decomposition())
            .iter()
            .map(ToString::to_string),
    );
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

    #[test]
    fn single_bag_is_a_leaf() {
        let nice = to_nice(&td(&[&[0, 1]], &[])).unwrap();
        assert_eq!(nice.len(), 1);
        assert_eq!(nice.width(), 1);
        assert!(validate_nice(2, &[(0, 1)], &nice).is_empty());
    }

    #[test]
    fn subset_bags_are_merged() {
        let t = td(&[&[0], &[0, 1], &[1], &[1, 2]], &[(0, 1), (1, 2), (2, 3)]);
        let nice = to_nice(&t).unwrap();
        let edges = [(0, 1), (1, 2)];
        assert!(
            validate_nice(3, &edges, &nice).is_empty(),
            "{:?}",
            validate_nice(3, &edges, &nice)
        );
        // root {0,1}; leaf {1,2}; forget 2; introduce 0
        assert_eq!(nice.len(), 3);
        assert_eq!(nice.nodes[nice.root()].bag, Bag::from_indices([0, 1]));
    }

    #[test]
    fn star_of_pendants_stays_linear() {
        // clique {0,1,2,3} with pendants 4..8 hanging off vertex 0
        let mut bags: Vec<Vec<usize>> = vec![vec![0, 1, 2, 3]];
        let mut edges = Vec::new();
        for p in 4..9 {
            bags.push(vec![0, p]);
            edges.push((0, bags.len() - 1));
        }
        let refs: Vec<&[usize]> = bags.iter().map(|b| b.as_slice()).collect();
        let nice = to_nice(&td(&refs, &edges)).unwrap();
        let mut g: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .collect();
        g.extend((4..9).map(|p| (0, p)));
        assert!(validate_nice(9, &g, &nice).is_empty());
        assert_eq!(nice.width(), 3);
        assert!(nice.len() <= 4 * 9, "{} nodes", nice.len());
        // pendant bags are padded to {0, 1, 2, p}: one forget and one
        // introduce per pendant, four joins
        assert_eq!(nice.kind_counts(), [5, 5, 5, 4]);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let t = td(&[&[0], &[1], &[0]], &[(0, 1), (1, 2)]);
        assert!(matches!(to_nice(&t), Err(TdError::Invalid(_))));
    }

    #[test]
    fn validator_catches_bad_typing() {
        let mut nice = to_nice(&td(&[&[0, 1], &[1, 2]], &[(0, 1)])).unwrap();
        assert!(validate_nice(3, &[(0, 1), (1, 2)], &nice).is_empty());
        let r = nice.root();
        nice.nodes[r].kind = NiceKind::Join;
        assert!(!validate_nice(3, &[(0, 1), (1, 2)], &nice).is_empty());
    }
}
