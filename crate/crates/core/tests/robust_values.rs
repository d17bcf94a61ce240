use cmdpst_core::ltlf::{parse_ltlf, Formula};
use cmdpst_core::oracle::{exact_value, TinyInstanceLimits};
use cmdpst_core::random::{random_cmdpst, random_tiny_mdpst, RandomModelParams};
use cmdpst_core::synthesis::{extract_decisions, robust_values};
use cmdpst_core::{
    gen_warehouse, robust_expectation, synthesize, Choice, Decision, Mdpst, Pipeline,
    SolveOptions, SynthesisConfig, Task, WarehouseSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The default stopping rule bounds the residual, not the error; oracle
/// comparisons at 1e-9 need a tighter residual on slowly mixing chains.
const TIGHT: SolveOptions = SolveOptions {
    epsilon: 1e-12,
    max_sweeps: 1_000_000,
};

fn solve(m: &Mdpst, w: &[bool]) -> Vec<f64> {
    robust_values(m, w, TIGHT, &mut || false)
        .unwrap()
        .values()
        .to_vec()
}

/// The structure with each state restricted to its decided action.
fn restrict(m: &Mdpst, decisions: &[Decision]) -> Mdpst {
    let choices: Vec<Vec<Choice>> = m
        .states()
        .map(|s| match decisions[s.0] {
            Decision::Stop => vec![],
            Decision::Act(a) => vec![m.choice(s, a).unwrap().clone()],
        })
        .collect();
    Mdpst::new(m.initial(), choices)
}

#[test]
fn value_iteration_matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let limits = TinyInstanceLimits::default();
    for i in 0..60 {
        let (m, w) = random_tiny_mdpst(&mut rng);
        let exact = exact_value(&m, &w, &limits).unwrap();
        let vi = solve(&m, &w);
        for s in 0..m.num_states() {
            assert!((exact[s] - vi[s]).abs() <= 1e-9, "instance {i}, state {s}: {} vs {}", exact[s], vi[s]);
        }
    }
}

#[test]
fn extracted_decisions_attain_the_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let limits = TinyInstanceLimits::default();
    for i in 0..60 {
        let (m, w) = random_tiny_mdpst(&mut rng);
        let v = solve(&m, &w);
        let d = extract_decisions(&m, &w, &v);
        let fixed = exact_value(&restrict(&m, &d), &w, &limits).unwrap();
        for s in 0..m.num_states() {
            assert!((fixed[s] - v[s]).abs() <= 1e-9, "instance {i}, state {s}: {} vs {}", fixed[s], v[s]);
        }
    }
}

#[test]
fn larger_winning_sets_never_lower_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (m, w) = random_tiny_mdpst(&mut rng);
        let v = solve(&m, &w);
        let mut more = w.clone();
        let extra = rng.random_range(0..more.len());
        more[extra] = true;
        let v2 = solve(&m, &more);
        for s in 0..m.num_states() {
            assert!((0.0..=1.0).contains(&v[s]));
            assert!(v2[s] >= v[s] - 1e-12);
        }
    }
}

/// A random feasible distribution: a random distribution inside each
/// successor set, mixed by the set probabilities.
fn random_feasible_expectation(c: &Choice, v: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    c.outcomes
        .iter()
        .map(|o| {
            let w: Vec<f64> = o.successors.iter().map(|_| rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let inner: f64 = o.successors.iter().zip(&w).map(|(t, x)| x / total * v[t.0]).sum();
            o.prob * inner
        })
        .sum()
}

#[test]
fn robust_expectation_lower_bounds_every_feasible_distribution() {
    let (m, _) = gen_warehouse(&WarehouseSpec::example()).unwrap();
    let s2 = m.state_by_name("2").unwrap();
    let right = m.action_by_name("RIGHT").unwrap();
    let mut v = vec![0.0; m.num_states()];
    v[m.state_by_name("7").unwrap().0] = 1.0;
    let bound = robust_expectation(&m, s2, right, &v).unwrap();
    assert!((bound - 0.0).abs() < 1e-12);
    v[m.state_by_name("5").unwrap().0] = 1.0;
    let bound = robust_expectation(&m, s2, right, &v).unwrap();
    assert!((bound - 0.8).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let c = m.choice(s2, right).unwrap();
    let mut lowest = f64::INFINITY;
    for _ in 0..1000 {
        let e = random_feasible_expectation(c, &v, &mut rng);
        assert!(e >= bound - 1e-12);
        lowest = lowest.min(e);
    }
    assert!(lowest < 1.0);

    for seed in 0..30 {
        let model = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &RandomModelParams::default());
        let v: Vec<f64> = (0..model.num_states()).map(|_| rng.random::<f64>()).collect();
        for s in model.states() {
            for c in model.choices(s) {
                let b = robust_expectation(&model, s, c.action, &v).unwrap();
                for _ in 0..50 {
                    assert!(random_feasible_expectation(c, &v, &mut rng) >= b - 1e-12);
                }
            }
        }
    }
}

#[test]
fn pipelines_agree_on_random_models() {
    let formulas = ["!Wo U Wd", "F Wd", "G !Wo", "X Wd | Wd", "F (Wd & X Wo)"];
    for seed in 0..30 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &RandomModelParams::default());
        for text in formulas {
            let f = parse_ltlf(text).unwrap();
            let run = |pipeline| {
                let cfg = SynthesisConfig { pipeline, ..SynthesisConfig::default() };
                synthesize(&m, Task::Formula(&f), &cfg).unwrap()
            };
            let naive = run(Pipeline::Naive);
            let pruned = run(Pipeline::Pruned);
            assert!((naive.value - pruned.value).abs() <= 1e-9, "seed {seed} {text}");
            assert!(pruned.stats.unrolled_states <= naive.stats.unrolled_states);
            assert_eq!(pruned.strategy.value(), pruned.value);
        }
    }
}

#[test]
fn trivial_tasks() {
    let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(1), &RandomModelParams::default());
    let yes = synthesize(&m, Task::Formula(&Formula::True), &SynthesisConfig::default()).unwrap();
    assert_eq!(yes.value, 1.0);
    assert_eq!(yes.strategy.decide(m.initial(), yes.strategy.initial_memory()).decision, Decision::Stop);
    let no = synthesize(&m, Task::Formula(&Formula::False), &SynthesisConfig::default()).unwrap();
    assert_eq!(no.value, 0.0);
}

#[test]
fn scaling_values_keeps_the_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let (m, w) = random_tiny_mdpst(&mut rng);
        let v = solve(&m, &w);
        let k = rng.random_range(0.1..1.0);
        let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
        assert_eq!(extract_decisions(&m, &w, &v), extract_decisions(&m, &w, &scaled));
    }
}
