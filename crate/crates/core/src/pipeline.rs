//! End-to-end solving: contraction, decomposition, dynamic program, plan
//! expansion and optional cross-check against brute force.

use std::time::Instant;

use serde::Serialize;

use crate::dp::{self, DpOutcome, SolveStats};
use crate::error::{Error, OracleError, SolveError, TdError};
use crate::model::{validate_instance, Plan, WorkflowInstance};
use crate::oracle::{brute_force_solve, DEFAULT_BUDGET};
use crate::preprocess::{contract_equalities, expand_plan, Contraction};
use crate::treedecomp::{
    decompose, hasse_edges, to_nice, validate_decomposition, Strategy, TreeDecomposition,
    EXACT_VERTEX_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// `None` picks min-fill, or exact search on small hierarchies.
    pub strategy: Option<Strategy>,
    /// Decomposition of the Hasse diagram to use instead of computing one.
    pub td: Option<TreeDecomposition>,
    pub oracle: bool,
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            strategy: None,
            td: None,
            oracle: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleCheck {
    Agree,
    Disagree,
    /// The brute-force search ran out of budget.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanEntry {
    pub step: String,
    pub user: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub contract_ms: f64,
    pub decompose_ms: f64,
    pub nice_ms: f64,
    pub dp_ms: f64,
    pub oracle_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub users: usize,
    pub steps: usize,
    pub supersteps: usize,
    /// Width of the decomposition used; absent when contraction already
    /// decided the instance.
    pub width: Option<usize>,
    pub nice_nodes: usize,
    pub verdict: Verdict,
    pub plan: Option<Vec<PlanEntry>>,
    #[serde(skip)]
    pub raw_plan: Option<Plan>,
    pub oracle: Option<OracleCheck>,
    pub advisories: Vec<String>,
    pub stats: SolveStats,
    pub timings: Timings,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn auto_strategy(n: usize) -> Strategy {
    if n <= EXACT_VERTEX_CAP {
        Strategy::ExactSmall
    } else {
        Strategy::MinFill
    }
}

pub fn solve_instance(inst: &WorkflowInstance, opts: &SolveOptions) -> Result<RunReport, Error> {
    let mut timings = Timings::default();
    let mut report = RunReport {
        users: inst.num_users(),
        steps: inst.num_steps(),
        supersteps: 0,
        width: None,
        nice_nodes: 0,
        verdict: Verdict::Unsat,
        plan: None,
        raw_plan: None,
        oracle: None,
        advisories: validate_instance(inst)
            .iter()
            .map(ToString::to_string)
            .collect(),
        stats: SolveStats::default(),
        timings: Timings::default(),
    };

    let t = Instant::now();
    let contraction = contract_equalities(inst);
    timings.contract_ms = ms(t);
    if let Contraction::Graph(cg) = contraction {
        report.supersteps = cg.num_supersteps();
        let n = inst.num_users();
        let edges = hasse_edges(&inst.users);
        let t = Instant::now();
        let td = match &opts.td {
            Some(td) => {
                let problems = validate_decomposition(n, &edges, td);
                if !problems.is_empty() {
                    return Err(TdError::Invalid(
                        problems.iter().map(ToString::to_string).collect(),
                    )
                    .into());
                }
                td.clone()
            }
            None => decompose(n, &edges, opts.strategy.unwrap_or_else(|| auto_strategy(n)))?,
        };
        timings.decompose_ms = ms(t);
        report.width = Some(td.width()?);

        let t = Instant::now();
        let ntd = to_nice(&td)?;
        timings.nice_ms = ms(t);
        report.nice_nodes = ntd.len();

        let (outcome, stats) = dp::solve(&cg, &inst.users, &ntd)?;
        timings.dp_ms = stats.wall_time.as_secs_f64() * 1e3;
        report.stats = stats;
        if let DpOutcome::Sat(superplan) = outcome {
            let plan = expand_plan(&cg, &superplan);
            if let Err(v) = inst.check_plan(&plan) {
                return Err(SolveError::Internal(format!("expanded plan rejected: {v}")).into());
            }
            report.verdict = Verdict::Sat;
            report.plan = Some(
                inst.named_plan(&plan)
                    .into_iter()
                    .map(|(step, user)| PlanEntry { step, user })
                    .collect(),
            );
            report.raw_plan = Some(plan);
        }
    }

    if opts.oracle {
        let t = Instant::now();
        report.oracle = Some(match brute_force_solve(inst, opts.budget) {
            Ok(found) => {
                let expected = if found.is_some() {
                    Verdict::Sat
                } else {
                    Verdict::Unsat
                };
                if expected == report.verdict {
                    OracleCheck::Agree
                } else {
                    OracleCheck::Disagree
                }
            }
            Err(OracleError::BudgetExceeded(_)) => OracleCheck::Skipped,
            Err(e) => return Err(e.into()),
        });
        timings.oracle_ms = ms(t);
    }
    report.timings = timings;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, ConstraintKind, UserId, UserPoset};

    #[test]
    fn contradictory_equalities_are_unsat_without_a_decomposition() {
        let inst = WorkflowInstance::new(
            UserPoset::antichain(2),
            vec![vec![UserId(0), UserId(1)]; 2],
            vec![
                Constraint::new(ConstraintKind::Eq, 0, 1),
                Constraint::new(ConstraintKind::Neq, 0, 1),
            ],
        );
        let opts = SolveOptions {
            oracle: true,
            ..SolveOptions::default()
        };
        let r = solve_instance(&inst, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.width, None);
        assert_eq!(r.oracle, Some(OracleCheck::Agree));
    }

    #[test]
    fn bad_external_decomposition_is_rejected() {
        let users = UserPoset::from_arcs(2, &[(UserId(0), UserId(1))]).unwrap();
        let inst = WorkflowInstance::new(users, vec![vec![UserId(0)]], vec![]);
        let opts = SolveOptions {
            td: Some(TreeDecomposition {
                bags: vec![
                    crate::treedecomp::Bag::from_indices([0]),
                    crate::treedecomp::Bag::from_indices([1]),
                ],
                edges: vec![(0, 1)],
            }),
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve_instance(&inst, &opts),
            Err(Error::Td(TdError::Invalid(_)))
        ));
    }
}
