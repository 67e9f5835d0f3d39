use crate::error::OracleError;
use crate::model::{Constraint, Plan, UserId, WorkflowInstance};

/// Default limit on search nodes for the exhaustive oracles.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

struct Search<'a> {
    inst: &'a WorkflowInstance,
    /// Constraints whose later step is the index, paired with the earlier one.
    back: Vec<Vec<Constraint>>,
    plan: Vec<UserId>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn consistent(&self, s: usize, u: UserId) -> bool {
        self.back[s].iter().all(|c| {
            let at = |x: usize| if x == s { u } else { self.plan[x] };
            c.holds(&self.inst.users, at(c.s1.0), at(c.s2.0))
        })
    }

    fn dfs(&mut self, s: usize) -> Result<bool, OracleError> {
        if s == self.inst.num_steps() {
            return Ok(true);
        }
        for &u in &self.inst.auth[s] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(OracleError::BudgetExceeded(self.budget));
            }
            if u.0 < self.inst.num_users() && self.consistent(s, u) {
                self.plan.push(u);
                if self.dfs(s + 1)? {
                    return Ok(true);
                }
                self.plan.pop();
            }
        }
        Ok(false)
    }
}

/// Exhaustive search in lexicographic order (steps by id, users by id).
/// Returns the first valid plan, or `None` when there is none.
pub fn brute_force_solve(
    inst: &WorkflowInstance,
    budget: u64,
) -> Result<Option<Plan>, OracleError> {
    let mut back = vec![Vec::new(); inst.num_steps()];
    for c in &inst.constraints {
        back[c.s1.0.max(c.s2.0)].push(*c);
    }
    let mut search = Search {
        inst,
        back,
        plan: Vec::with_capacity(inst.num_steps()),
        nodes: 0,
        budget,
    };
    Ok(search.dfs(0)?.then_some(Plan {
        assignment: search.plan,
    }))
}
