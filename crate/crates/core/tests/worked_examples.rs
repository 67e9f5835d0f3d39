use std::path::PathBuf;

use wsp_core::format::parse_instance;
use wsp_core::model::{Plan, UserId, WorkflowInstance};
use wsp_core::oracle::{brute_force_solve, DEFAULT_BUDGET};
use wsp_core::order::{compare, relation_tuple, separates, transitive_reduction, Relation};
use wsp_core::pipeline::{solve_instance, SolveOptions, Verdict};
use wsp_core::treedecomp::{decompose, hasse_edges, parse_td, validate_decomposition, Strategy};

fn fixture(name: &str) -> WorkflowInstance {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn user(inst: &WorkflowInstance, name: &str) -> UserId {
    inst.user_index(name).unwrap()
}

#[test]
fn expenses_with_seniority_is_unsat() {
    let inst = fixture("expenses.wsp");
    let r = solve_instance(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Unsat);
    assert_eq!(brute_force_solve(&inst, DEFAULT_BUDGET).unwrap(), None);
}

/// Every one of the 3^4 plans, checked directly.
fn all_valid_plans(inst: &WorkflowInstance) -> Vec<Plan> {
    let mut out = Vec::new();
    for code in 0..81usize {
        let assignment = (0..4)
            .map(|i| UserId(code / 3usize.pow(3 - i) % 3))
            .collect();
        let plan = Plan { assignment };
        if inst.check_plan(&plan).is_ok() {
            out.push(plan);
        }
    }
    out
}

#[test]
fn expenses_with_separation_is_sat() {
    let inst = fixture("expenses_neq.wsp");
    let valid = all_valid_plans(&inst);
    assert!(!valid.is_empty());
    // the enumeration above runs in lexicographic order
    let first = brute_force_solve(&inst, DEFAULT_BUDGET).unwrap().unwrap();
    assert_eq!(first, valid[0]);
    let names: Vec<_> = inst
        .named_plan(&first)
        .into_iter()
        .map(|(_, u)| u)
        .collect();
    assert_eq!(names, ["Alice", "Bob", "Carol", "Alice"]);

    let r = solve_instance(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Sat);
    let plan = r.raw_plan.unwrap();
    assert!(valid.contains(&plan));
    // the plan quoted for this example is one of the valid ones
    let quoted = Plan {
        assignment: ["Bob", "Alice", "Carol", "Bob"]
            .iter()
            .map(|n| user(&inst, n))
            .collect(),
    };
    assert!(valid.contains(&quoted));
}

#[test]
fn rhul_order() {
    let inst = fixture("rhul.wsp");
    let p = &inst.users;
    assert_eq!(p.cover_arcs().len(), 12);
    assert_eq!(p.closure_arcs().len(), 15);
    let arcs: Vec<(usize, usize)> = p.cover_arcs().iter().map(|&(a, b)| (a.0, b.0)).collect();
    let mut reduced = transitive_reduction(7, &arcs).unwrap();
    reduced.sort_unstable();
    let mut sorted = arcs.clone();
    sorted.sort_unstable();
    assert_eq!(reduced, sorted);

    let u = |n| user(&inst, n);
    assert_eq!(compare(p, u("Dean1"), u("VP2")), Ok(Relation::Lt));
    assert_eq!(compare(p, u("Principal"), u("Dean3")), Ok(Relation::Gt));
    assert_eq!(compare(p, u("Dean1"), u("Dean2")), Ok(Relation::Inc));
    let vps = [u("VP1"), u("VP2"), u("VP3")];
    assert_eq!(
        relation_tuple(p, u("Dean1"), &vps).unwrap().to_string(),
        "([<],[<],[<])"
    );
    assert_eq!(
        relation_tuple(p, u("Principal"), &vps).unwrap().to_string(),
        "([>],[>],[>])"
    );
    assert!(relation_tuple(p, u("Dean1"), &[]).unwrap().is_empty());
    assert_eq!(separates(p, &vps, u("Dean1"), u("Principal")), Ok(true));
    assert_eq!(separates(p, &[], u("Dean1"), u("Principal")), Ok(false));
}

#[test]
fn rhul_decompositions() {
    let inst = fixture("rhul.wsp");
    let edges = hasse_edges(&inst.users);
    let exact = decompose(7, &edges, Strategy::ExactSmall).unwrap();
    assert!(validate_decomposition(7, &edges, &exact).is_empty());
    assert_eq!(exact.width(), Ok(3));
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", "rhul.td"]
        .iter()
        .collect();
    let figure = parse_td(&std::fs::read_to_string(path).unwrap(), &inst.user_names).unwrap();
    assert!(validate_decomposition(7, &edges, &figure).is_empty());
    assert_eq!(figure.width(), exact.width());

    let r = solve_instance(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(r.width, Some(3));
    assert_eq!(r.verdict, Verdict::Sat);
}

#[test]
fn one_step_one_user() {
    let inst = parse_instance("p wsp 1 1\nu x\ns t\na t x\n").unwrap();
    let r = solve_instance(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(r.raw_plan.unwrap().assignment, vec![UserId(0)]);
}

#[test]
fn solving_is_deterministic() {
    let inst = fixture("expenses_neq.wsp");
    let a = solve_instance(&inst, &SolveOptions::default()).unwrap();
    let b = solve_instance(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(a.raw_plan, b.raw_plan);
    assert_eq!(a.stats.total_states, b.stats.total_states);
}
