//! Scaling sweeps: fixed step count, hierarchies of bounded treewidth,
//! growing user count.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dp::{self, DpOutcome};
use crate::error::Error;
use crate::model::{Constraint, ConstraintKind, UserId, UserPoset, WorkflowInstance};
use crate::preprocess::{contract_equalities, Contraction};
use crate::treedecomp::{decompose, hasse_edges, to_nice, Strategy};

/// Random hierarchy whose Hasse diagram has treewidth at most 2: a random
/// partial 2-tree with every edge subdivided (so no arc is implied by
/// others), padded with pendant users.
pub fn bounded_treewidth_hierarchy(n: usize, rng: &mut impl Rng) -> UserPoset {
    let mut core_adj: Vec<Vec<usize>> = Vec::new();
    let mut core_user: Vec<usize> = Vec::new();
    let mut arcs = Vec::new();
    let mut users = 0;
    if n > 0 {
        core_adj.push(Vec::new());
        core_user.push(0);
        users = 1;
    }
    while users + 5 <= n {
        let c = core_adj.len();
        let p = rng.gen_range(0..c);
        let mut ends = vec![p];
        if !core_adj[p].is_empty() && rng.gen_bool(0.7) {
            ends.push(core_adj[p][rng.gen_range(0..core_adj[p].len())]);
        }
        let v = users;
        users += 1;
        core_adj.push(Vec::new());
        core_user.push(v);
        for w in ends {
            // v < middle < w
            let mid = users;
            users += 1;
            arcs.push((UserId(v), UserId(mid)));
            arcs.push((UserId(mid), UserId(core_user[w])));
            core_adj[c].push(w);
            core_adj[w].push(c);
        }
    }
    while users < n {
        let above = rng.gen_range(0..users);
        arcs.push((UserId(users), UserId(above)));
        users += 1;
    }
    UserPoset::from_arcs(n, &arcs).expect("arcs point to older users")
}

/// Workflow on `k` steps over a random bounded-treewidth hierarchy: a chain
/// of `<` constraints on even steps, `!=` between neighbors, random
/// authorization with density one half.
pub fn bench_instance(k: usize, n: usize, seed: u64) -> WorkflowInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = bounded_treewidth_hierarchy(n, &mut rng);
    let auth = (0..k)
        .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).map(UserId).collect())
        .collect();
    let mut constraints = Vec::new();
    for s in 0..k.saturating_sub(1) {
        let kind = if s % 2 == 0 {
            ConstraintKind::Lt
        } else {
            ConstraintKind::Neq
        };
        constraints.push(Constraint::new(kind, s, s + 1));
    }
    if k >= 3 {
        constraints.push(Constraint::new(ConstraintKind::Neq, 0, k - 1));
    }
    WorkflowInstance::new(users, auth, constraints)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub width: usize,
    pub n: usize,
    pub seed: u64,
    pub nice_nodes: usize,
    pub max_states: usize,
    pub total_states: usize,
    pub sat: bool,
    /// Fastest of the repetitions.
    pub dp_ms: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str =
        "k,width,n,seed,nice_nodes,max_states,total_states,sat,dp_ms";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.3}",
            self.k,
            self.width,
            self.n,
            self.seed,
            self.nice_nodes,
            self.max_states,
            self.total_states,
            self.sat,
            self.dp_ms
        )
    }
}

/// Times the dynamic program on one cell; decomposition is not timed.
pub fn run_cell(k: usize, n: usize, seed: u64, reps: usize) -> Result<BenchRow, Error> {
    let inst = bench_instance(k, n, seed);
    let Contraction::Graph(cg) = contract_equalities(&inst) else {
        unreachable!("bench instances carry no equalities")
    };
    let td = decompose(n, &hasse_edges(&inst.users), Strategy::MinFill)?;
    let ntd = to_nice(&td)?;
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..reps.max(1) {
        let (outcome, stats) = dp::solve(&cg, &inst.users, &ntd)?;
        best = best.min(stats.wall_time);
        last = Some((outcome, stats));
    }
    let (outcome, stats) = last.expect("at least one repetition");
    Ok(BenchRow {
        k,
        width: td.width()?,
        n,
        seed,
        nice_nodes: ntd.len(),
        max_states: stats.max_states,
        total_states: stats.total_states,
        sat: matches!(outcome, DpOutcome::Sat(_)),
        dp_ms: best.as_secs_f64() * 1e3,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hierarchy_width_is_at_most_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 10, 80] {
            let p = bounded_treewidth_hierarchy(n, &mut rng);
            let td = decompose(n, &hasse_edges(&p), Strategy::MinFill).unwrap();
            assert!(td.width().unwrap() <= 2);
        }
        let p = bounded_treewidth_hierarchy(80, &mut rng);
        assert!(
            p.cover_arcs().len() >= 80,
            "Hasse diagram should contain cycles"
        );
        let td = decompose(80, &hasse_edges(&p), Strategy::MinFill).unwrap();
        assert_eq!(td.width(), Ok(2));
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powf(1.5)))
            .collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-9);
    }

    #[test]
    fn cell_runs() {
        let row = run_cell(4, 30, 1, 1).unwrap();
        assert_eq!(row.k, 4);
        assert!(row.width <= 2);
        assert!(row.csv().starts_with("4,"));
    }
}
