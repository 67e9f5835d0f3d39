use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsp_core::oracle::{brute_force_solve, gen_random_instance, GenParams, DEFAULT_BUDGET};
use wsp_core::pipeline::{solve_instance, SolveOptions, Verdict};
use wsp_core::treedecomp::Strategy;

fn params(seed: u64) -> GenParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let k = rng.gen_range(1..=5);
    let pairs = k * (k - 1) / 2;
    GenParams {
        n: rng.gen_range(1..=8),
        k,
        arc_density: rng.gen_range(0.0..0.8),
        auth_density: rng.gen_range(0.3..1.0),
        eq: rng.gen_range(0..=pairs.min(1)),
        neq: rng.gen_range(0..=pairs.min(3)),
        lt: rng.gen_range(0..=pairs.min(3)),
    }
}

#[test]
fn dp_agrees_with_brute_force() {
    let mut sat = 0;
    for seed in 0..600 {
        let inst = gen_random_instance(&params(seed), seed).unwrap();
        let expected = brute_force_solve(&inst, DEFAULT_BUDGET).unwrap();
        for strategy in [Strategy::MinDegree, Strategy::MinFill, Strategy::ExactSmall] {
            let opts = SolveOptions {
                strategy: Some(strategy),
                ..SolveOptions::default()
            };
            let report = solve_instance(&inst, &opts).unwrap();
            assert_eq!(
                report.verdict == Verdict::Sat,
                expected.is_some(),
                "seed {seed} {strategy:?}\n{}",
                wsp_core::format::serialize_instance(&inst)
            );
            if let Some(plan) = &report.raw_plan {
                assert_eq!(inst.check_plan(plan), Ok(()), "seed {seed}");
            }
        }
        sat += expected.is_some() as usize;
    }
    // both outcomes must be well represented
    assert!(sat > 100 && sat < 500, "{sat} satisfiable");
}
