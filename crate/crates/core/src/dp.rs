//! Dynamic programming over a nice tree decomposition of the Hasse diagram.
//!
//! A state at node `t` with bag `B` assigns every superstep one [`Label`]:
//! absent (not yet planned), a bag user, or the relation tuple of a user
//! that was already forgotten below `t`. Tables keep only reachable states
//! and are filled child to parent, so every stored state is realizable by a
//! partial plan over the users seen in the subtree.

use std::fmt;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rustc_hash::{FxBuildHasher, FxHashMap};
use smallvec::SmallVec;

use crate::error::SolveError;
use crate::model::{UserId, UserPoset};
use crate::order::Relation;
use crate::preprocess::ConstraintGraph;
use crate::treedecomp::{Bag, NiceKind, NiceTreeDecomposition};

/// Bags are limited so a relation tuple fits a `u64` in base 3.
pub const MAX_BAG: usize = 40;
/// Superstep sets are handled as `u64` masks.
pub const MAX_SUPERSTEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Absent,
    /// Index into the node's bag.
    User(u8),
    /// Packed relation tuple of a forgotten user against the bag.
    Tuple(u64),
}

pub type State = SmallVec<[Label; 8]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Leaf,
    Forget { child: usize },
    Introduce { child: usize },
    Join { left: usize, right: usize },
}

/// The reachable states of one node, each with how it was derived.
#[derive(Debug, Clone, Default)]
pub struct StateTable {
    states: IndexMap<State, Witness, FxBuildHasher>,
}

impl StateTable {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, state: &[Label]) -> bool {
        self.states.contains_key(state)
    }

    pub fn get_index(&self, i: usize) -> Option<(&State, &Witness)> {
        self.states.get_index(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, &Witness)> {
        self.states.iter()
    }

    fn insert(&mut self, state: State, w: Witness) {
        self.states.entry(state).or_insert(w);
    }
}

const POW3: [u64; MAX_BAG + 1] = {
    let mut p = [1u64; MAX_BAG + 1];
    let mut i = 1;
    while i <= MAX_BAG {
        p[i] = p[i - 1] * 3;
        i += 1;
    }
    p
};

fn digit(t: u64, i: usize) -> u64 {
    (t / POW3[i]) % 3
}

fn insert_digit(t: u64, p: usize, d: u64) -> u64 {
    t % POW3[p] + d * POW3[p] + (t / POW3[p]) * POW3[p + 1]
}

fn remove_digit(t: u64, p: usize) -> u64 {
    t % POW3[p] + (t / POW3[p + 1]) * POW3[p]
}

/// Bag positions holding `[<]` and `[>]`.
fn lt_gt_masks(t: u64, len: usize) -> (u64, u64) {
    let (mut lt, mut gt) = (0, 0);
    for i in 0..len {
        match Relation::from_digit(digit(t, i)) {
            Relation::Lt => lt |= 1 << i,
            Relation::Gt => gt |= 1 << i,
            Relation::Inc => {}
        }
    }
    (lt, gt)
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

/// Constraint graph and order in the shape the node procedures need.
pub struct DpContext<'a> {
    poset: &'a UserPoset,
    k: usize,
    auth: Vec<Vec<bool>>,
    neq: Vec<u64>,
    succ: Vec<u64>,
    pred: Vec<u64>,
}

impl<'a> DpContext<'a> {
    pub fn new(cg: &ConstraintGraph, poset: &'a UserPoset) -> Result<Self, SolveError> {
        let k = cg.num_supersteps();
        if k > MAX_SUPERSTEPS {
            return Err(SolveError::TooManySteps(k, MAX_SUPERSTEPS));
        }
        let n = poset.num_users();
        let mut auth = vec![vec![false; n]; k];
        for (s, list) in cg.auth.iter().enumerate() {
            for u in list {
                if u.0 >= n {
                    return Err(SolveError::UniverseMismatch(format!(
                        "superstep {s} authorizes user {} but the order has {n} users",
                        u.0
                    )));
                }
                auth[s][u.0] = true;
            }
        }
        let (mut neq, mut succ, mut pred) = (vec![0u64; k], vec![0u64; k], vec![0u64; k]);
        for &(a, b) in &cg.neq_edges {
            neq[a] |= 1 << b;
            neq[b] |= 1 << a;
        }
        for &(a, b) in &cg.lt_arcs {
            succ[a] |= 1 << b;
            pred[b] |= 1 << a;
        }
        Ok(DpContext {
            poset,
            k,
            auth,
            neq,
            succ,
            pred,
        })
    }

    fn all(&self) -> u64 {
        if self.k == 64 {
            u64::MAX
        } else {
            (1 << self.k) - 1
        }
    }

    fn less(&self, a: UserId, b: UserId) -> bool {
        self.poset.less(a, b)
    }
}

pub fn process_leaf(ctx: &DpContext, bag: &Bag) -> StateTable {
    let mut table = StateTable::default();
    let mut state: State = SmallVec::from_elem(Label::Absent, ctx.k);
    leaf_rec(ctx, bag, 0, &mut state, &mut table);
    table
}

fn leaf_rec(ctx: &DpContext, bag: &Bag, s: usize, state: &mut State, table: &mut StateTable) {
    if s == ctx.k {
        table.insert(state.clone(), Witness::Leaf);
        return;
    }
    state[s] = Label::Absent;
    leaf_rec(ctx, bag, s + 1, state, table);
    for (i, &u) in bag.iter().enumerate() {
        if !ctx.auth[s][u.0] {
            continue;
        }
        let ok = (0..s).all(|j| match state[j] {
            Label::User(b) => {
                let w = bag[b as usize];
                (ctx.neq[s] >> j & 1 == 0 || w != u)
                    && (ctx.pred[s] >> j & 1 == 0 || ctx.less(w, u))
                    && (ctx.succ[s] >> j & 1 == 0 || ctx.less(u, w))
            }
            _ => true,
        });
        if ok {
            state[s] = Label::User(i as u8);
            leaf_rec(ctx, bag, s + 1, state, table);
        }
    }
    state[s] = Label::Absent;
}

/// `child_bag = bag ∪ {forgotten}`. Steps on the forgotten user turn into
/// its relation tuple against `bag`; other tuples lose that coordinate.
pub fn process_forget(
    ctx: &DpContext,
    bag: &Bag,
    child_bag: &Bag,
    child: &StateTable,
    forgotten: UserId,
) -> StateTable {
    let p = child_bag
        .position(forgotten)
        .expect("forgotten user is in the child bag");
    let mut code = 0;
    for (i, &w) in bag.iter().enumerate() {
        code += ctx.poset.relation(forgotten, w).digit() * POW3[i];
    }
    let mut table = StateTable::default();
    for (idx, (cs, _)) in child.iter().enumerate() {
        let state: State = cs
            .iter()
            .map(|&l| match l {
                Label::User(i) if i as usize == p => Label::Tuple(code),
                Label::User(i) if i as usize > p => Label::User(i - 1),
                Label::Tuple(t) => Label::Tuple(remove_digit(t, p)),
                other => other,
            })
            .collect();
        table.insert(state, Witness::Forget { child: idx });
    }
    table
}

/// `bag = child_bag ∪ {introduced}`. The introduced user is new to the
/// subtree, so the child bag separates it from every forgotten user and
/// each tuple gets exactly one new coordinate. Absent steps may move onto
/// the introduced user.
pub fn process_introduce(
    ctx: &DpContext,
    bag: &Bag,
    child_bag: &Bag,
    child: &StateTable,
    introduced: UserId,
) -> StateTable {
    let up = introduced;
    let p = bag.position(up).expect("introduced user is in the bag");
    let (mut below, mut above) = (0u64, 0u64);
    for (i, &w) in child_bag.iter().enumerate() {
        if ctx.less(w, up) {
            below |= 1 << i;
        } else if ctx.less(up, w) {
            above |= 1 << i;
        }
    }
    let authorized: u64 = (0..ctx.k)
        .filter(|&s| ctx.auth[s][up.0])
        .fold(0, |m, s| m | 1 << s);
    let mut table = StateTable::default();
    for (idx, (cs, _)) in child.iter().enumerate() {
        let (mut absent, mut under, mut over) = (0u64, 0u64, 0u64);
        let mut state: State = SmallVec::with_capacity(ctx.k);
        for (s, &l) in cs.iter().enumerate() {
            let (label, rel) = match l {
                Label::Absent => {
                    absent |= 1 << s;
                    (Label::Absent, Relation::Inc)
                }
                Label::User(i) => {
                    let rel = ctx.poset.relation(child_bag[i as usize], up);
                    let j = if (i as usize) < p { i } else { i + 1 };
                    (Label::User(j), rel)
                }
                Label::Tuple(t) => {
                    let (lt, gt) = lt_gt_masks(t, child_bag.len());
                    let rel = if lt & below != 0 {
                        Relation::Lt
                    } else if gt & above != 0 {
                        Relation::Gt
                    } else {
                        Relation::Inc
                    };
                    (Label::Tuple(insert_digit(t, p, rel.digit())), rel)
                }
            };
            match rel {
                Relation::Lt => under |= 1 << s,
                Relation::Gt => over |= 1 << s,
                Relation::Inc => {}
            }
            state.push(label);
        }
        let present = ctx.all() & !absent;
        // Steps that may join the introduced user individually.
        let mut cand = absent & authorized;
        for x in bits(cand) {
            if ctx.pred[x] & present & !under != 0 || ctx.succ[x] & present & !over != 0 {
                cand &= !(1 << x);
            }
        }
        let mut sub = cand;
        loop {
            let independent = bits(sub).all(|x| (ctx.neq[x] | ctx.succ[x]) & sub == 0);
            if independent {
                let mut next = state.clone();
                for x in bits(sub) {
                    next[x] = Label::User(p as u8);
                }
                table.insert(next, Witness::Introduce { child: idx });
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & cand;
        }
    }
    table
}

type Signature = SmallVec<[u8; 8]>;

/// Bag users per step (`0` for absent or tuple), and the tuple-step mask.
fn split_key(state: &[Label]) -> (Signature, u64, u64) {
    let mut sig = Signature::with_capacity(state.len());
    let (mut users, mut tuples) = (0u64, 0u64);
    for (s, &l) in state.iter().enumerate() {
        sig.push(match l {
            Label::User(i) => {
                users |= 1 << s;
                i + 1
            }
            Label::Tuple(_) => {
                tuples |= 1 << s;
                0
            }
            Label::Absent => 0,
        });
    }
    (sig, users, tuples)
}

/// Combines left and right states that agree on bag users and resolve
/// disjoint sets of tuple steps. A `<` arc from a step resolved on one side
/// to a step resolved on the other needs a bag user above the first and
/// below the second.
pub fn process_join(
    ctx: &DpContext,
    bag: &Bag,
    left: &StateTable,
    right: &StateTable,
) -> StateTable {
    let mut by_sig: FxHashMap<Signature, Vec<usize>> = FxHashMap::default();
    let mut by_mask: FxHashMap<(Signature, u64), Vec<usize>> = FxHashMap::default();
    let mut right_tuples = Vec::with_capacity(right.len());
    for (idx, (rs, _)) in right.iter().enumerate() {
        let (sig, _, tuples) = split_key(rs);
        by_sig.entry(sig.clone()).or_default().push(idx);
        by_mask.entry((sig, tuples)).or_default().push(idx);
        right_tuples.push(tuples);
    }
    let masks = |state: &State| -> SmallVec<[(u64, u64); 8]> {
        state
            .iter()
            .map(|l| match l {
                Label::Tuple(t) => lt_gt_masks(*t, bag.len()),
                _ => (0, 0),
            })
            .collect()
    };
    let mut table = StateTable::default();
    for (li, (ls, _)) in left.iter().enumerate() {
        let (sig, users, ltuples) = split_key(ls);
        let Some(group) = by_sig.get(&sig) else {
            continue;
        };
        let free = ctx.all() & !(users | ltuples);
        let lmasks = masks(ls);
        let consider = |ri: usize, table: &mut StateTable| {
            let rtuples = right_tuples[ri];
            if rtuples & !free != 0 {
                return;
            }
            let rs = right.get_index(ri).expect("index in range").0;
            let rmasks = masks(rs);
            for a in bits(ltuples) {
                for b in bits(ctx.succ[a] & rtuples) {
                    if lmasks[a].0 & rmasks[b].1 == 0 {
                        return;
                    }
                }
                for b in bits(ctx.pred[a] & rtuples) {
                    if rmasks[b].0 & lmasks[a].1 == 0 {
                        return;
                    }
                }
            }
            let mut next = ls.clone();
            for b in bits(rtuples) {
                next[b] = rs[b];
            }
            table.insert(
                next,
                Witness::Join {
                    left: li,
                    right: ri,
                },
            );
        };
        if (free.count_ones() as usize) < usize::BITS as usize
            && 1usize << free.count_ones() < group.len()
        {
            let mut sub = free;
            loop {
                if let Some(v) = by_mask.get(&(sig.clone(), sub)) {
                    for &ri in v {
                        consider(ri, &mut table);
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
        } else {
            for &ri in group {
                consider(ri, &mut table);
            }
        }
    }
    table
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct SolveStats {
    pub nodes: usize,
    pub leaf_nodes: usize,
    pub introduce_nodes: usize,
    pub forget_nodes: usize,
    pub join_nodes: usize,
    pub max_states: usize,
    pub total_states: usize,
    pub root_states: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl fmt::Display for SolveStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes={}", self.nodes)?;
        writeln!(f, "leaf_nodes={}", self.leaf_nodes)?;
        writeln!(f, "introduce_nodes={}", self.introduce_nodes)?;
        writeln!(f, "forget_nodes={}", self.forget_nodes)?;
        writeln!(f, "join_nodes={}", self.join_nodes)?;
        writeln!(f, "max_states={}", self.max_states)?;
        writeln!(f, "total_states={}", self.total_states)?;
        writeln!(f, "root_states={}", self.root_states)?;
        write!(f, "wall_time_ms={:.3}", self.wall_time.as_secs_f64() * 1e3)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpOutcome {
    /// One user per superstep.
    Sat(Vec<UserId>),
    Unsat,
}

fn check_universe(
    cg: &ConstraintGraph,
    poset: &UserPoset,
    ntd: &NiceTreeDecomposition,
) -> Result<(), SolveError> {
    let n = poset.num_users();
    if ntd.is_empty() {
        return Err(SolveError::UniverseMismatch(
            "decomposition has no nodes".into(),
        ));
    }
    let mut seen = vec![false; n];
    for (i, node) in ntd.nodes.iter().enumerate() {
        if node.bag.len() > MAX_BAG {
            return Err(SolveError::BagTooLarge(node.bag.len(), MAX_BAG));
        }
        for u in node.bag.iter() {
            if u.0 >= n {
                return Err(SolveError::UniverseMismatch(format!(
                    "node {i} holds user {} but the order has {n} users",
                    u.0
                )));
            }
            seen[u.0] = true;
        }
    }
    if let Some(u) = seen.iter().position(|s| !s) {
        return Err(SolveError::UniverseMismatch(format!(
            "user {u} appears in no bag"
        )));
    }
    if cg.num_supersteps() > MAX_SUPERSTEPS {
        return Err(SolveError::TooManySteps(
            cg.num_supersteps(),
            MAX_SUPERSTEPS,
        ));
    }
    Ok(())
}

/// All node tables, children before parents.
pub fn compute_tables(ctx: &DpContext, ntd: &NiceTreeDecomposition) -> Vec<StateTable> {
    let mut tables: Vec<StateTable> = Vec::with_capacity(ntd.len());
    for node in &ntd.nodes {
        let table = match node.kind {
            NiceKind::Leaf => process_leaf(ctx, &node.bag),
            NiceKind::Forget(u) => {
                let c = node.children[0];
                process_forget(ctx, &node.bag, &ntd.nodes[c].bag, &tables[c], u)
            }
            NiceKind::Introduce(u) => {
                let c = node.children[0];
                process_introduce(ctx, &node.bag, &ntd.nodes[c].bag, &tables[c], u)
            }
            NiceKind::Join => {
                let (l, r) = (node.children[0], node.children[1]);
                process_join(ctx, &node.bag, &tables[l], &tables[r])
            }
        };
        tables.push(table);
    }
    tables
}

/// Reads a plan off the witnesses below `root_state` of the root table.
pub fn extract_plan(
    ntd: &NiceTreeDecomposition,
    tables: &[StateTable],
    root_state: usize,
) -> Result<Vec<UserId>, SolveError> {
    let k = tables[ntd.root()]
        .get_index(root_state)
        .map(|(s, _)| s.len())
        .ok_or_else(|| SolveError::Internal("root state out of range".into()))?;
    let mut plan: Vec<Option<UserId>> = vec![None; k];
    let mut stack = vec![(ntd.root(), root_state)];
    while let Some((node, idx)) = stack.pop() {
        let (state, w) = tables[node].get_index(idx).expect("witness index in range");
        let bag = &ntd.nodes[node].bag;
        for (s, l) in state.iter().enumerate() {
            if let Label::User(i) = l {
                let u = bag[*i as usize];
                if plan[s].is_some_and(|v| v != u) {
                    return Err(SolveError::Internal(format!("superstep {s} bound twice")));
                }
                plan[s] = Some(u);
            }
        }
        let ch = &ntd.nodes[node].children;
        match *w {
            Witness::Leaf => {}
            Witness::Forget { child } | Witness::Introduce { child } => stack.push((ch[0], child)),
            Witness::Join { left, right } => {
                stack.push((ch[0], left));
                stack.push((ch[1], right));
            }
        }
    }
    plan.into_iter()
        .enumerate()
        .map(|(s, u)| u.ok_or_else(|| SolveError::Internal(format!("superstep {s} never bound"))))
        .collect()
}

/// Decides the contracted instance. A returned plan has been rechecked
/// against every authorization and constraint.
pub fn solve(
    cg: &ConstraintGraph,
    poset: &UserPoset,
    ntd: &NiceTreeDecomposition,
) -> Result<(DpOutcome, SolveStats), SolveError> {
    let start = Instant::now();
    check_universe(cg, poset, ntd)?;
    let ctx = DpContext::new(cg, poset)?;
    let tables = compute_tables(&ctx, ntd);
    let [leaf_nodes, introduce_nodes, forget_nodes, join_nodes] = ntd.kind_counts();
    let root = &tables[ntd.root()];
    let mut stats = SolveStats {
        nodes: ntd.len(),
        leaf_nodes,
        introduce_nodes,
        forget_nodes,
        join_nodes,
        max_states: tables.iter().map(StateTable::len).max().unwrap_or(0),
        total_states: tables.iter().map(StateTable::len).sum(),
        root_states: root.len(),
        wall_time: Duration::ZERO,
    };
    let full = root
        .iter()
        .position(|(s, _)| s.iter().all(|l| *l != Label::Absent));
    let outcome = match full {
        None => DpOutcome::Unsat,
        Some(idx) => {
            let plan = extract_plan(ntd, &tables, idx)?;
            if !cg.satisfied_by(poset, &plan) {
                return Err(SolveError::Internal(
                    "extracted plan fails the constraint check".into(),
                ));
            }
            DpOutcome::Sat(plan)
        }
    };
    stats.wall_time = start.elapsed();
    Ok((outcome, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, ConstraintKind, WorkflowInstance};
    use crate::preprocess::{contract_equalities, Contraction};
    use crate::treedecomp::{decompose, hasse_edges, to_nice, Strategy};

    fn run(inst: &WorkflowInstance) -> DpOutcome {
        let Contraction::Graph(cg) = contract_equalities(inst) else {
            return DpOutcome::Unsat;
        };
        let n = inst.num_users();
        let td = decompose(n, &hasse_edges(&inst.users), Strategy::MinFill).unwrap();
        let ntd = to_nice(&td).unwrap();
        solve(&cg, &inst.users, &ntd).unwrap().0
    }

    fn expenses(kind: ConstraintKind) -> WorkflowInstance {
        // Alice=0, Bob=1, Carol=2; steps PrepC, AppC, PrepP, AppP.
        let users =
            UserPoset::from_arcs(3, &[(UserId(1), UserId(0)), (UserId(2), UserId(0))]).unwrap();
        let auth = vec![(0..3).map(UserId).collect(); 4];
        let cs = vec![
            Constraint::new(kind, 0, 1),
            Constraint::new(kind, 2, 3),
            Constraint::new(ConstraintKind::Neq, 0, 2),
            Constraint::new(ConstraintKind::Neq, 1, 2),
            Constraint::new(ConstraintKind::Neq, 1, 3),
        ];
        WorkflowInstance::new(users, auth, cs)
    }

    #[test]
    fn expenses_example() {
        assert_eq!(run(&expenses(ConstraintKind::Lt)), DpOutcome::Unsat);
        let inst = expenses(ConstraintKind::Neq);
        let DpOutcome::Sat(plan) = run(&inst) else {
            panic!("expected Sat")
        };
        assert_eq!(plan.len(), 4);
    }

    #[test]
    fn single_step() {
        let inst = WorkflowInstance::new(UserPoset::antichain(2), vec![vec![UserId(1)]], vec![]);
        assert_eq!(run(&inst), DpOutcome::Sat(vec![UserId(1)]));
    }

    #[test]
    fn leaf_table() {
        // one user, two steps joined by !=
        let inst = WorkflowInstance::new(
            UserPoset::antichain(1),
            vec![vec![UserId(0)]; 2],
            vec![Constraint::new(ConstraintKind::Neq, 0, 1)],
        );
        let Contraction::Graph(cg) = contract_equalities(&inst) else {
            panic!()
        };
        let ctx = DpContext::new(&cg, &inst.users).unwrap();
        let t = process_leaf(&ctx, &Bag::from_indices([0]));
        assert_eq!(t.len(), 3);
        assert!(!t.contains(&[Label::User(0), Label::User(0)]));
        let empty = process_leaf(&ctx, &Bag::default());
        assert_eq!(empty.len(), 1);
    }

    #[test]
    fn forget_uses_the_forgotten_users_relations() {
        // 0 < 1, forget 0 from {0,1}
        let users = UserPoset::from_arcs(2, &[(UserId(0), UserId(1))]).unwrap();
        let inst = WorkflowInstance::new(users, vec![vec![UserId(0), UserId(1)]], vec![]);
        let Contraction::Graph(cg) = contract_equalities(&inst) else {
            panic!()
        };
        let ctx = DpContext::new(&cg, &inst.users).unwrap();
        let child_bag = Bag::from_indices([0, 1]);
        let leaf = process_leaf(&ctx, &child_bag);
        let t = process_forget(&ctx, &Bag::from_indices([1]), &child_bag, &leaf, UserId(0));
        assert!(t.contains(&[Label::Tuple(Relation::Lt.digit())]));
        assert!(t.contains(&[Label::User(0)]));
        assert!(t.contains(&[Label::Absent]));
    }

    #[test]
    fn tuple_digits() {
        // digits (Inc, Gt, Lt)
        let t = 2 + 3;
        assert_eq!(digit(t, 1), 1);
        assert_eq!(remove_digit(t, 1), 2);
        assert_eq!(insert_digit(remove_digit(t, 1), 1, 1), t);
        assert_eq!(lt_gt_masks(t, 3), (0b100, 0b010));
    }

    #[test]
    fn universe_mismatch() {
        let inst = WorkflowInstance::new(UserPoset::antichain(3), vec![vec![UserId(0)]], vec![]);
        let Contraction::Graph(cg) = contract_equalities(&inst) else {
            panic!()
        };
        let ntd = to_nice(&decompose(2, &[], Strategy::MinFill).unwrap()).unwrap();
        assert!(matches!(
            solve(&cg, &inst.users, &ntd),
            Err(SolveError::UniverseMismatch(_))
        ));
    }
}
