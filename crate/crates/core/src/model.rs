//! Instance data model: users and their seniority order, steps, authorization
//! lists, constraints and plans.

use std::fmt;

use serde::Serialize;

use crate::error::OrderError;
use crate::order::{self, BitMatrix, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct UserId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StepId(pub usize);

/// A strict partial order on users, held both as its Hasse diagram (cover
/// arcs) and as its full reachability relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserPoset {
    n: usize,
    cover: Vec<(UserId, UserId)>,
    closure: BitMatrix,
    cover_succ: Vec<Vec<usize>>,
}

impl UserPoset {
    /// Builds the order generated by `arcs` (`(lo, hi)` means `lo < hi`). The
    /// arcs may be any DAG; redundant arcs are dropped from the cover set.
    pub fn from_arcs(n: usize, arcs: &[(UserId, UserId)]) -> Result<Self, OrderError> {
        let raw: Vec<(usize, usize)> = arcs.iter().map(|&(a, b)| (a.0, b.0)).collect();
        let closure = order::reachability(n, &raw)?;
        let cover_raw = order::cover_relation(&closure);
        let mut cover_succ = vec![Vec::new(); n];
        for &(x, y) in &cover_raw {
            cover_succ[x].push(y);
        }
        Ok(UserPoset {
            n,
            cover: cover_raw
                .into_iter()
                .map(|(x, y)| (UserId(x), UserId(y)))
                .collect(),
            closure,
            cover_succ,
        })
    }

    /// `n` pairwise incomparable users.
    pub fn antichain(n: usize) -> Self {
        Self::from_arcs(n, &[]).expect("an empty arc set is acyclic")
    }

    pub fn num_users(&self) -> usize {
        self.n
    }

    /// Hasse diagram arcs, sorted.
    pub fn cover_arcs(&self) -> &[(UserId, UserId)] {
        &self.cover
    }

    /// Full-graph arcs (every `u < v`), sorted.
    pub fn closure_arcs(&self) -> Vec<(UserId, UserId)> {
        (0..self.n)
            .flat_map(|x| {
                self.closure
                    .row_ones(x)
                    .map(move |y| (UserId(x), UserId(y)))
            })
            .collect()
    }

    pub fn closure_matrix(&self) -> &BitMatrix {
        &self.closure
    }

    pub(crate) fn cover_successors(&self) -> &[Vec<usize>] {
        &self.cover_succ
    }

    /// `u < v`.
    #[inline]
    pub fn less(&self, u: UserId, v: UserId) -> bool {
        self.closure.get(u.0, v.0)
    }

    /// Relation of `u` to `v`; `u == v` yields `Inc` (callers exclude it).
    #[inline]
    pub fn relation(&self, u: UserId, v: UserId) -> Relation {
        if self.closure.get(u.0, v.0) {
            Relation::Lt
        } else if self.closure.get(v.0, u.0) {
            Relation::Gt
        } else {
            Relation::Inc
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstraintKind {
    Eq,
    Neq,
    Lt,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::Eq => "eq",
            ConstraintKind::Neq => "neq",
            ConstraintKind::Lt => "lt",
        }
    }
}

/// `(kind, s1, s2)`; for `Lt` the user of `s1` must be junior to that of `s2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub s1: StepId,
    pub s2: StepId,
}

impl Constraint {
    pub fn new(kind: ConstraintKind, s1: usize, s2: usize) -> Self {
        Constraint {
            kind,
            s1: StepId(s1),
            s2: StepId(s2),
        }
    }

    pub fn holds(&self, poset: &UserPoset, u1: UserId, u2: UserId) -> bool {
        match self.kind {
            ConstraintKind::Eq => u1 == u2,
            ConstraintKind::Neq => u1 != u2,
            ConstraintKind::Lt => poset.less(u1, u2),
        }
    }
}

/// A total assignment of users to steps, indexed by `StepId`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Plan {
    pub assignment: Vec<UserId>,
}

impl Plan {
    pub fn user(&self, s: StepId) -> UserId {
        self.assignment[s.0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowInstance {
    pub user_names: Vec<String>,
    pub step_names: Vec<String>,
    pub users: UserPoset,
    /// `auth[s]` is the sorted, duplicate-free list `L(s)`.
    pub auth: Vec<Vec<UserId>>,
    /// Duplicate-free, in declaration order.
    pub constraints: Vec<Constraint>,
}

impl WorkflowInstance {
    /// Instance with generated names `u0..`, `s0..`. Authorization lists are
    /// normalized and duplicate constraints dropped.
    pub fn new(users: UserPoset, auth: Vec<Vec<UserId>>, constraints: Vec<Constraint>) -> Self {
        let user_names = (0..users.num_users()).map(|i| format!("u{i}")).collect();
        let step_names = (0..auth.len()).map(|i| format!("s{i}")).collect();
        let mut inst = WorkflowInstance {
            user_names,
            step_names,
            users,
            auth,
            constraints: Vec::new(),
        };
        for a in inst.auth.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        for c in constraints {
            inst.push_constraint(c);
        }
        inst
    }

    pub fn num_users(&self) -> usize {
        self.users.num_users()
    }

    pub fn num_steps(&self) -> usize {
        self.auth.len()
    }

    /// Appends `c` unless an identical constraint is already present.
    pub fn push_constraint(&mut self, c: Constraint) -> bool {
        if self.constraints.contains(&c) {
            return false;
        }
        self.constraints.push(c);
        true
    }

    /// The `k x n` 0/1 matrix with a one at `(s, u)` iff `u` is in `L(s)`.
    pub fn auth_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::new(self.num_steps(), self.num_users());
        for (s, list) in self.auth.iter().enumerate() {
            for u in list {
                m.set(s, u.0);
            }
        }
        m
    }

    pub fn user_index(&self, name: &str) -> Option<UserId> {
        self.user_names.iter().position(|n| n == name).map(UserId)
    }

    pub fn step_index(&self, name: &str) -> Option<StepId> {
        self.step_names.iter().position(|n| n == name).map(StepId)
    }

    /// First violated requirement of `plan`, if any. Independent of the
    /// solvers: it reads nothing but the instance itself.
    pub fn check_plan(&self, plan: &Plan) -> Result<(), PlanViolation> {
        if plan.assignment.len() != self.num_steps() {
            return Err(PlanViolation::WrongLength {
                expected: self.num_steps(),
                found: plan.assignment.len(),
            });
        }
        for (s, &u) in plan.assignment.iter().enumerate() {
            if u.0 >= self.num_users() || self.auth[s].binary_search(&u).is_err() {
                return Err(PlanViolation::Unauthorized(StepId(s), u));
            }
        }
        for c in &self.constraints {
            if !c.holds(&self.users, plan.user(c.s1), plan.user(c.s2)) {
                return Err(PlanViolation::Constraint(*c));
            }
        }
        Ok(())
    }

    /// Plan rendered as `step -> user` name pairs.
    pub fn named_plan(&self, plan: &Plan) -> Vec<(String, String)> {
        plan.assignment
            .iter()
            .enumerate()
            .map(|(s, u)| (self.step_names[s].clone(), self.user_names[u.0].clone()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanViolation {
    WrongLength { expected: usize, found: usize },
    Unauthorized(StepId, UserId),
    Constraint(Constraint),
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::WrongLength { expected, found } => {
                write!(f, "plan covers {found} steps, instance has {expected}")
            }
            PlanViolation::Unauthorized(s, u) => {
                write!(f, "user {} is not authorized for step {}", u.0, s.0)
            }
            PlanViolation::Constraint(c) => write!(
                f,
                "constraint {} {} {} violated",
                c.kind.keyword(),
                c.s1.0,
                c.s2.0
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Structural problem; downstream operations may not be applied.
    Error,
    /// Well-formed but guaranteed unsatisfiable.
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    NameCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    DuplicateName {
        what: &'static str,
        name: String,
    },
    UserOutOfRange {
        step: StepId,
        user: UserId,
    },
    UnsortedAuthorization(StepId),
    StepOutOfRange(Constraint),
    DuplicateConstraint(Constraint),
    ReflexiveDisequality(StepId),
    ReflexiveSeniority(StepId),
    NoAuthorizedUser(StepId),
}

impl Diagnostic {
    pub fn severity(&self) -> Severity {
        match self {
            Diagnostic::ReflexiveDisequality(_)
            | Diagnostic::ReflexiveSeniority(_)
            | Diagnostic::NoAuthorizedUser(_) => Severity::Advisory,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NameCount {
                what,
                expected,
                found,
            } => {
                write!(f, "{found} {what} names for {expected} {what}s")
            }
            Diagnostic::DuplicateName { what, name } => write!(f, "duplicate {what} name `{name}`"),
            Diagnostic::UserOutOfRange { step, user } => {
                write!(f, "step {} authorizes out-of-range user {}", step.0, user.0)
            }
            Diagnostic::UnsortedAuthorization(s) => {
                write!(
                    f,
                    "authorization list of step {} is not sorted and duplicate-free",
                    s.0
                )
            }
            Diagnostic::StepOutOfRange(c) => write!(
                f,
                "constraint {} {} {} references an out-of-range step",
                c.kind.keyword(),
                c.s1.0,
                c.s2.0
            ),
            Diagnostic::DuplicateConstraint(c) => write!(
                f,
                "duplicate constraint {} {} {}",
                c.kind.keyword(),
                c.s1.0,
                c.s2.0
            ),
            Diagnostic::ReflexiveDisequality(s) => {
                write!(f, "reflexive disequality on step {}", s.0)
            }
            Diagnostic::ReflexiveSeniority(s) => write!(f, "reflexive seniority on step {}", s.0),
            Diagnostic::NoAuthorizedUser(s) => write!(f, "no authorized user for step {}", s.0),
        }
    }
}

/// Every invariant violation of `inst`, structural errors first.
pub fn validate_instance(inst: &WorkflowInstance) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let (n, k) = (inst.num_users(), inst.num_steps());
    for (what, names, expected) in [("user", &inst.user_names, n), ("step", &inst.step_names, k)] {
        if names.len() != expected {
            out.push(Diagnostic::NameCount {
                what,
                expected,
                found: names.len(),
            });
        }
        let mut sorted: Vec<&String> = names.iter().collect();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                out.push(Diagnostic::DuplicateName {
                    what,
                    name: w[0].clone(),
                });
            }
        }
    }
    for (s, list) in inst.auth.iter().enumerate() {
        for &u in list {
            if u.0 >= n {
                out.push(Diagnostic::UserOutOfRange {
                    step: StepId(s),
                    user: u,
                });
            }
        }
        if list.windows(2).any(|w| w[0] >= w[1]) {
            out.push(Diagnostic::UnsortedAuthorization(StepId(s)));
        }
    }
    for (i, c) in inst.constraints.iter().enumerate() {
        if c.s1.0 >= k || c.s2.0 >= k {
            out.push(Diagnostic::StepOutOfRange(*c));
        }
        if inst.constraints[..i].contains(c) {
            out.push(Diagnostic::DuplicateConstraint(*c));
        }
    }
    for c in &inst.constraints {
        if c.s1 == c.s2 && c.s1.0 < k {
            match c.kind {
                ConstraintKind::Neq => out.push(Diagnostic::ReflexiveDisequality(c.s1)),
                ConstraintKind::Lt => out.push(Diagnostic::ReflexiveSeniority(c.s1)),
                ConstraintKind::Eq => {}
            }
        }
    }
    for (s, list) in inst.auth.iter().enumerate() {
        if list.is_empty() {
            out.push(Diagnostic::NoAuthorizedUser(StepId(s)));
        }
    }
    out
}

/// No `Severity::Error` diagnostics.
pub fn is_well_formed(diags: &[Diagnostic]) -> bool {
    diags.iter().all(|d| d.severity() == Severity::Advisory)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_step(constraints: Vec<Constraint>) -> WorkflowInstance {
        let users = UserPoset::antichain(2);
        WorkflowInstance::new(users, vec![vec![UserId(0), UserId(1)]; 2], constraints)
    }

    #[test]
    fn duplicate_constraints_are_dropped() {
        let c = Constraint::new(ConstraintKind::Neq, 0, 1);
        let inst = two_step(vec![c, c]);
        assert_eq!(inst.constraints, vec![c]);
    }

    #[test]
    fn well_formed_instance_has_no_diagnostics() {
        let inst = two_step(vec![Constraint::new(ConstraintKind::Neq, 0, 1)]);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn reflexive_disequality_is_flagged() {
        let inst = two_step(vec![Constraint::new(ConstraintKind::Neq, 1, 1)]);
        let d = validate_instance(&inst);
        assert_eq!(d, vec![Diagnostic::ReflexiveDisequality(StepId(1))]);
        assert_eq!(d[0].to_string(), "reflexive disequality on step 1");
        assert!(is_well_formed(&d));
    }

    #[test]
    fn empty_authorization_is_advisory() {
        let mut inst = two_step(vec![]);
        inst.auth[0].clear();
        let d = validate_instance(&inst);
        assert_eq!(d, vec![Diagnostic::NoAuthorizedUser(StepId(0))]);
        assert!(d[0].to_string().contains("no authorized user"));
    }

    #[test]
    fn structural_errors_are_reported() {
        let mut inst = two_step(vec![]);
        inst.auth[1].push(UserId(7));
        inst.constraints
            .push(Constraint::new(ConstraintKind::Lt, 0, 4));
        inst.step_names[1] = inst.step_names[0].clone();
        let d = validate_instance(&inst);
        assert!(d.contains(&Diagnostic::UserOutOfRange {
            step: StepId(1),
            user: UserId(7)
        }));
        assert!(d.iter().any(|x| matches!(x, Diagnostic::StepOutOfRange(_))));
        assert!(d
            .iter()
            .any(|x| matches!(x, Diagnostic::DuplicateName { .. })));
        assert!(!is_well_formed(&d));
    }

    #[test]
    fn checker_reports_violations() {
        let users = UserPoset::from_arcs(2, &[(UserId(0), UserId(1))]).unwrap();
        let inst = WorkflowInstance::new(
            users,
            vec![vec![UserId(0), UserId(1)], vec![UserId(1)]],
            vec![Constraint::new(ConstraintKind::Lt, 0, 1)],
        );
        assert!(inst
            .check_plan(&Plan {
                assignment: vec![UserId(0), UserId(1)]
            })
            .is_ok());
        assert_eq!(
            inst.check_plan(&Plan {
                assignment: vec![UserId(1), UserId(0)]
            }),
            Err(PlanViolation::Unauthorized(StepId(1), UserId(0)))
        );
        assert!(matches!(
            inst.check_plan(&Plan {
                assignment: vec![UserId(1), UserId(1)]
            }),
            Err(PlanViolation::Constraint(_))
        ));
    }

    #[test]
    fn poset_keeps_cover_and_closure() {
        let arcs = [
            (UserId(0), UserId(1)),
            (UserId(1), UserId(2)),
            (UserId(0), UserId(2)),
        ];
        let p = UserPoset::from_arcs(3, &arcs).unwrap();
        assert_eq!(
            p.cover_arcs(),
            &[(UserId(0), UserId(1)), (UserId(1), UserId(2))]
        );
        assert_eq!(p.closure_arcs().len(), 3);
        assert!(p.less(UserId(0), UserId(2)));
        assert_eq!(p.relation(UserId(2), UserId(0)), Relation::Gt);
    }
}
