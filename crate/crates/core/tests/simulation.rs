use cmdpst_core::ltlf::parse_ltlf;
use cmdpst_core::random::{random_cmdpst, RandomModelParams};
use cmdpst_core::simulate::wilson_halfwidth;
use cmdpst_core::{
    estimate, gen_warehouse, run_episode, synthesize, AcceptanceMode, NatureKind,
    SynthesisConfig, Task, Termination, WarehouseSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn synthesized_strategies_never_exhaust() {
    for seed in 0..25 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &RandomModelParams::default());
        for mode in [AcceptanceMode::Lag, AcceptanceMode::Lookahead] {
            let f = parse_ltlf("!Wo U Wd").unwrap();
            let cfg = SynthesisConfig { mode, ..SynthesisConfig::default() };
            let r = synthesize(&m, Task::Formula(&f), &cfg).unwrap();
            let limit = 10 * r.product.num_states().max(1);
            for nature in NatureKind::ALL {
                let rep = estimate(&m, &r.strategy, nature, 200, seed, limit).unwrap();
                assert_eq!(rep.exhaustion_count, 0, "seed {seed}");
                let slack = 3.0 * rep.confidence_halfwidth + 1e-9;
                if nature == NatureKind::WorstCaseGreedy || r.value == 1.0 {
                    assert!(rep.success_rate >= r.value - slack - 0.05, "seed {seed} {nature:?}");
                }
            }
        }
    }
}

#[test]
fn episodes_are_reproducible() {
    let (m, f) = gen_warehouse(&WarehouseSpec::benchmark(4)).unwrap();
    let f = parse_ltlf(&f).unwrap();
    let r = synthesize(&m, Task::Formula(&f), &SynthesisConfig::default()).unwrap();
    for nature in NatureKind::ALL {
        let a = estimate(&m, &r.strategy, nature, 300, 42, 1000).unwrap();
        let b = estimate(&m, &r.strategy, nature, 300, 42, 1000).unwrap();
        assert_eq!(a, b);
        let e1 = run_episode(&m, &r.strategy, nature, 42, 1000).unwrap();
        let e2 = run_episode(&m, &r.strategy, nature, 42, 1000).unwrap();
        assert_eq!(e1, e2);
        assert!(!e1.exhausted);
        assert!(!e1.satisfied || e1.terminated_by == Termination::StrategyStop);
    }
}

#[test]
fn path_respects_the_model() {
    let (m, f) = gen_warehouse(&WarehouseSpec::example()).unwrap();
    let f = parse_ltlf(&f).unwrap();
    let r = synthesize(&m, Task::Formula(&f), &SynthesisConfig::default()).unwrap();
    for seed in 0..100 {
        let ep = run_episode(&m, &r.strategy, NatureKind::Uniform, seed, 500).unwrap();
        m.structure().check_path(&ep.path).unwrap();
        assert!(cmdpst_core::is_feasible_path(&m, &ep.path).unwrap());
        assert_eq!(ep.trace.len(), ep.path.len());
    }
}

#[test]
fn wilson_interval_shrinks_with_runs() {
    assert!(wilson_halfwidth(50, 100, 1.96) > wilson_halfwidth(5000, 10000, 1.96));
}
