use proptest::prelude::*;
use wsp_core::format::{parse_instance, serialize_instance};
use wsp_core::model::{validate_instance, Severity, UserId};
use wsp_core::oracle::{brute_force_solve, gen_random_instance, GenParams, DEFAULT_BUDGET};
use wsp_core::preprocess::{contract_equalities, expand_plan, Contraction};

fn params() -> impl Strategy<Value = (GenParams, u64)> {
    (
        1usize..=6,
        1usize..=5,
        0.0f64..0.6,
        0.2f64..1.0,
        any::<u64>(),
    )
        .prop_map(|(n, k, a, l, seed)| {
            let pairs = k * (k - 1) / 2;
            let p = GenParams {
                n,
                k,
                arc_density: a,
                auth_density: l,
                eq: pairs.min(1),
                neq: pairs.min(2),
                lt: pairs.min(2),
            };
            (p, seed)
        })
}

/// Whether some superplan satisfies the contracted graph, by enumeration.
fn contracted_sat(inst: &wsp_core::model::WorkflowInstance) -> bool {
    let Contraction::Graph(cg) = contract_equalities(inst) else {
        return false;
    };
    let n = inst.num_users();
    let q = cg.num_supersteps();
    let mut plan = vec![UserId(0); q];
    let total = n.pow(q as u32);
    (0..total).any(|mut code| {
        for slot in plan.iter_mut() {
            *slot = UserId(code % n);
            code /= n;
        }
        cg.satisfied_by(&inst.users, &plan) && inst.check_plan(&expand_plan(&cg, &plan)).is_ok()
    })
}

proptest! {
    #[test]
    fn serialization_roundtrips((p, seed) in params()) {
        let inst = gen_random_instance(&p, seed).unwrap();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(serialize_instance(&back), text);
        prop_assert_eq!(back.users.closure_arcs(), inst.users.closure_arcs());
        prop_assert!(validate_instance(&back).iter().all(|d| d.severity() == Severity::Advisory));
    }

    #[test]
    fn contraction_preserves_satisfiability((p, seed) in params()) {
        let inst = gen_random_instance(&p, seed).unwrap();
        let direct = brute_force_solve(&inst, DEFAULT_BUDGET).unwrap().is_some();
        prop_assert_eq!(contracted_sat(&inst), direct);
    }
}
