//! Equality elimination and the mixed constraint graph on supersteps.

use std::fmt::Write as _;

use crate::model::{ConstraintKind, Plan, StepId, UserId, UserPoset, WorkflowInstance};

/// Mixed graph on supersteps: `!=` edges and `<` arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintGraph {
    /// Original steps of each superstep, ascending.
    pub members: Vec<Vec<StepId>>,
    /// Intersection of the members' authorization lists, ascending.
    pub auth: Vec<Vec<UserId>>,
    /// Unordered pairs stored as `(lo, hi)`, sorted, no duplicates.
    pub neq_edges: Vec<(usize, usize)>,
    /// Sorted, no duplicates.
    pub lt_arcs: Vec<(usize, usize)>,
    superstep_of: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contraction {
    /// The equalities force a `!=` or `<` constraint onto a single user.
    NoInstance(String),
    Graph(ConstraintGraph),
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn intersect(a: &[UserId], b: &[UserId]) -> Vec<UserId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Contracts each connected component of the equality graph into a
/// superstep. Superstep ids follow the smallest member step id.
pub fn contract_equalities(inst: &WorkflowInstance) -> Contraction {
    let k = inst.num_steps();
    let mut uf = UnionFind((0..k).collect());
    for c in &inst.constraints {
        if c.kind == ConstraintKind::Eq {
            uf.union(c.s1.0, c.s2.0);
        }
    }
    let mut root_id = vec![usize::MAX; k];
    let mut members: Vec<Vec<StepId>> = Vec::new();
    let mut superstep_of = Vec::with_capacity(k);
    for s in 0..k {
        let r = uf.find(s);
        if root_id[r] == usize::MAX {
            root_id[r] = members.len();
            members.push(Vec::new());
        }
        superstep_of.push(root_id[r]);
        members[root_id[r]].push(StepId(s));
    }
    let auth = members
        .iter()
        .map(|m| {
            m[1..].iter().fold(inst.auth[m[0].0].clone(), |acc, s| {
                intersect(&acc, &inst.auth[s.0])
            })
        })
        .collect();

    let mut neq_edges = Vec::new();
    let mut lt_arcs = Vec::new();
    for c in &inst.constraints {
        let (a, b) = (superstep_of[c.s1.0], superstep_of[c.s2.0]);
        match c.kind {
            ConstraintKind::Eq => {}
            ConstraintKind::Neq | ConstraintKind::Lt if a == b => {
                let (n1, n2) = (&inst.step_names[c.s1.0], &inst.step_names[c.s2.0]);
                let what = if c.kind == ConstraintKind::Neq {
                    "!="
                } else {
                    "<"
                };
                return Contraction::NoInstance(format!(
                    "steps {n1} and {n2} must share a user but are constrained by {what}"
                ));
            }
            ConstraintKind::Neq => neq_edges.push((a.min(b), a.max(b))),
            ConstraintKind::Lt => lt_arcs.push((a, b)),
        }
    }
    neq_edges.sort_unstable();
    neq_edges.dedup();
    lt_arcs.sort_unstable();
    lt_arcs.dedup();
    Contraction::Graph(ConstraintGraph {
        members,
        auth,
        neq_edges,
        lt_arcs,
        superstep_of,
    })
}

/// Every original step takes the user of its superstep.
pub fn expand_plan(graph: &ConstraintGraph, superplan: &[UserId]) -> Plan {
    Plan {
        assignment: graph.superstep_of.iter().map(|&q| superplan[q]).collect(),
    }
}

impl ConstraintGraph {
    pub fn num_supersteps(&self) -> usize {
        self.members.len()
    }

    pub fn num_steps(&self) -> usize {
        self.superstep_of.len()
    }

    pub fn superstep_of(&self, s: StepId) -> usize {
        self.superstep_of[s.0]
    }

    /// Whether `superplan` satisfies authorization, every `!=` edge and every
    /// `<` arc.
    pub fn satisfied_by(&self, poset: &UserPoset, superplan: &[UserId]) -> bool {
        superplan.len() == self.num_supersteps()
            && superplan
                .iter()
                .zip(&self.auth)
                .all(|(u, list)| list.binary_search(u).is_ok())
            && self
                .neq_edges
                .iter()
                .all(|&(a, b)| superplan[a] != superplan[b])
            && self
                .lt_arcs
                .iter()
                .all(|&(a, b)| poset.less(superplan[a], superplan[b]))
    }

    /// Graphviz digraph: `<` arcs point to the senior superstep, `!=`
    /// edges are undirected and dashed.
    pub fn to_dot(&self, inst: &WorkflowInstance) -> String {
        let mut out = String::from("digraph constraint_graph {\n");
        for (q, m) in self.members.iter().enumerate() {
            let label: Vec<&str> = m.iter().map(|s| inst.step_names[s.0].as_str()).collect();
            let _ = writeln!(out, "  q{q} [label=\"{}\"];", label.join("="));
        }
        for &(a, b) in &self.lt_arcs {
            let _ = writeln!(out, "  q{a} -> q{b} [label=\"<\"];");
        }
        for &(a, b) in &self.neq_edges {
            let _ = writeln!(out, "  q{a} -> q{b} [label=\"!=\", dir=none, style=dashed];");
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Constraint;

    fn inst(auth: Vec<Vec<usize>>, cs: &[(ConstraintKind, usize, usize)]) -> WorkflowInstance {
        let n = auth.iter().flatten().max().map_or(0, |m| m + 1);
        WorkflowInstance::new(
            UserPoset::antichain(n),
            auth.into_iter()
                .map(|l| l.into_iter().map(UserId).collect())
                .collect(),
            cs.iter()
                .map(|&(k, a, b)| Constraint::new(k, a, b))
                .collect(),
        )
    }

    #[test]
    fn equality_plus_disequality_is_no_instance() {
        let i = inst(
            vec![vec![0, 1], vec![0, 1]],
            &[(ConstraintKind::Eq, 0, 1), (ConstraintKind::Neq, 0, 1)],
        );
        assert!(matches!(
            contract_equalities(&i),
            Contraction::NoInstance(_)
        ));
    }

    #[test]
    fn reflexive_seniority_is_no_instance() {
        let i = inst(vec![vec![0]], &[(ConstraintKind::Lt, 0, 0)]);
        assert!(matches!(
            contract_equalities(&i),
            Contraction::NoInstance(_)
        ));
    }

    #[test]
    fn superstep_auth_is_intersection() {
        let i = inst(vec![vec![0, 1], vec![1, 2]], &[(ConstraintKind::Eq, 0, 1)]);
        let Contraction::Graph(g) = contract_equalities(&i) else {
            panic!()
        };
        assert_eq!(g.num_supersteps(), 1);
        assert_eq!(g.members[0], vec![StepId(0), StepId(1)]);
        assert_eq!(g.auth[0], vec![UserId(1)]);
        let plan = expand_plan(&g, &[UserId(1)]);
        assert_eq!(plan.assignment, vec![UserId(1), UserId(1)]);
    }

    #[test]
    fn identity_contraction() {
        let i = inst(
            vec![vec![0, 1]; 3],
            &[
                (ConstraintKind::Neq, 2, 0),
                (ConstraintKind::Lt, 1, 2),
                (ConstraintKind::Neq, 0, 2),
            ],
        );
        let Contraction::Graph(g) = contract_equalities(&i) else {
            panic!()
        };
        assert_eq!(g.num_supersteps(), 3);
        assert_eq!(g.neq_edges, vec![(0, 2)]);
        assert_eq!(g.lt_arcs, vec![(1, 2)]);
        let sp = [UserId(0), UserId(1), UserId(1)];
        assert_eq!(expand_plan(&g, &sp).assignment, sp.to_vec());
    }

    #[test]
    fn superstep_ids_follow_smallest_member() {
        let i = inst(
            vec![vec![0]; 4],
            &[
                (ConstraintKind::Eq, 3, 1),
                (ConstraintKind::Lt, 2, 3),
                (ConstraintKind::Neq, 0, 2),
            ],
        );
        let Contraction::Graph(g) = contract_equalities(&i) else {
            panic!()
        };
        assert_eq!(
            g.members,
            vec![vec![StepId(0)], vec![StepId(1), StepId(3)], vec![StepId(2)]]
        );
        assert_eq!(g.lt_arcs, vec![(2, 1)]);
        let dot = g.to_dot(&i);
        assert!(dot.contains("q2 -> q1 [label=\"<\"]"));
        assert!(dot.starts_with("digraph "));
        assert!(dot.contains("q0 -> q2 [label=\"!=\", dir=none"));
        assert!(dot.contains("label=\"s1=s3\""));
    }
}
