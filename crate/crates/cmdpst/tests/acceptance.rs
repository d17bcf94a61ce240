//! Acceptance suite. Runs as a plain binary so every criterion prints its
//! PASS/FAIL line and timings are not disturbed by parallel tests.

// Checks are written as `!(x <= tol)` on purpose: NaN must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cmdpst::bench::{run_experiment, write_csv, BenchConfig, Measured};
use cmdpst_core::ltlf::{compile_dfa, eval_trace_bits, parse_ltlf};
use cmdpst_core::oracle::{enumerate_feasible_paths, exact_value, TinyInstanceLimits};
use cmdpst_core::random::{random_cmdpst, random_tiny_mdpst, RandomModelParams};
use cmdpst_core::synthesis::robust_values;
use cmdpst_core::unroll::{build_unrolled, lift_path, project_path, Lifted};
use cmdpst_core::{
    build_product, estimate, feasible_region, gen_warehouse, is_feasible_path,
    robust_value_iteration, synthesize, AcceptanceMode, AtomSet, Cmdpst, FinitePath, NatureKind,
    Pipeline, SolveOptions, StateId, SynthesisConfig, Task, WarehouseSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Oracle comparisons need a residual well below the 1e-9 tolerance.
const TIGHT: SolveOptions = SolveOptions {
    epsilon: 1e-12,
    max_sweeps: 1_000_000,
};

fn within(start: Instant, limit: Duration) -> Result<f64, String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
    } else {
        Ok(t.as_secs_f64())
    }
}

fn ac1_pipeline_equality() -> Verdict {
    let start = Instant::now();
    let formulas = ["!Wo U Wd", "F Wd", "G !Wo", "F (Wd & X Wo)", "!Wd U (Wo & X Wd)"];
    let params = RandomModelParams {
        max_states: 8,
        max_actions: 3,
        max_cost: 3,
        max_cap: 6,
        ..RandomModelParams::default()
    };
    let mut instances = 0;
    let mut strict = 0;
    for seed in 0..50u64 {
        let model = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(1000 + seed), &params);
        for text in formulas {
            let f = parse_ltlf(text).unwrap();
            let run = |pipeline| {
                let cfg = SynthesisConfig {
                    pipeline,
                    ..SynthesisConfig::default()
                };
                synthesize(&model, Task::Formula(&f), &cfg).unwrap()
            };
            let naive = run(Pipeline::Naive);
            let pruned = run(Pipeline::Pruned);
            ensure!(
                (naive.value - pruned.value).abs() <= 1e-9,
                "seed {seed}, {text}: naive {} vs pruned {}",
                naive.value,
                pruned.value
            );
            let (a, b) = (naive.stats.unrolled_states, pruned.stats.unrolled_states);
            ensure!(b <= a, "seed {seed}, {text}: pruned {b} states > naive {a}");
            instances += 1;
            if b < a {
                strict += 1;
            }
        }
    }
    let share = strict as f64 / instances as f64;
    ensure!(share >= 0.3, "strict reduction on only {:.1}% of instances", 100.0 * share);
    let secs = within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{instances} instances, values equal within 1e-9, strict reduction on {:.1}%, {secs:.1}s",
        100.0 * share
    ))
}

fn ac2_oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let limits = TinyInstanceLimits::default();
    let mut worst = 0.0f64;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bare = 40;
    for i in 0..bare {
        let (m, w) = random_tiny_mdpst(&mut rng);
        let exact = exact_value(&m, &w, &limits).map_err(|e| e.to_string())?;
        let vi = robust_values(&m, &w, TIGHT, &mut || false).map_err(|e| e.to_string())?;
        for s in m.states() {
            let d = (exact[s.0] - vi.value(s)).abs();
            worst = worst.max(d);
            ensure!(d <= 1e-9, "bare instance {i}, state {}: {} vs {}", s.0, exact[s.0], vi.value(s));
        }
    }

    // Unrolled products of small models that fit the oracle.
    let params = RandomModelParams {
        max_states: 3,
        max_actions: 2,
        max_cost: 1,
        max_cap: 1,
        max_outcomes: 2,
        max_set_size: 2,
        reload_prob: 0.3,
    };
    let f = parse_ltlf("F Wd").unwrap();
    let mut unrolled_checked = 0;
    let mut seed = 0u64;
    while unrolled_checked < 20 && seed < 5000 {
        let model = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &params);
        seed += 1;
        let r = synthesize(&model, Task::Formula(&f), &SynthesisConfig::default()).unwrap();
        let m = r.unrolled.structure();
        let Ok(exact) = exact_value(m, r.unrolled.targets(), &limits) else {
            continue;
        };
        let vi = robust_value_iteration(&r.unrolled, None, TIGHT).map_err(|e| e.to_string())?;
        for s in m.states() {
            let d = (exact[s.0] - vi.value(s)).abs();
            worst = worst.max(d);
            ensure!(d <= 1e-9, "unrolled model seed {}: state {} {} vs {}", seed - 1, s.0, exact[s.0], vi.value(s));
        }
        unrolled_checked += 1;
    }
    ensure!(unrolled_checked >= 20, "only {unrolled_checked} unrolled instances fit the oracle");
    let secs = within(start, Duration::from_secs(120))?;
    Ok(format!(
        "{bare} bare + {unrolled_checked} unrolled instances, max difference {worst:.1e}, {secs:.1}s"
    ))
}

const CORPUS: [&str; 30] = [
    "true",
    "false",
    "a",
    "!a",
    "X a",
    "X !a",
    "a & b",
    "a | !b",
    "a U b",
    "!a U b",
    "F a",
    "G a",
    "F !a",
    "X X a",
    "F X a",
    "X F a",
    "a U X b",
    "X a U b",
    "F (a & b)",
    "a & F b",
    "G !a",
    "!(a U b)",
    "(a | b) U !a",
    "X (a | b)",
    "a & X b",
    "!X a",
    "a U (b U a)",
    "F a | b",
    "X (a U b)",
    "!a & F b",
];

fn ac3_dfa_correctness() -> Verdict {
    let start = Instant::now();
    let atoms = vec!["a".to_string(), "b".to_string()];
    let mut traces: Vec<Vec<AtomSet>> = vec![vec![]];
    let mut layer: Vec<Vec<AtomSet>> = vec![vec![]];
    for _ in 0..5 {
        layer = layer
            .iter()
            .flat_map(|t| {
                (0..4).map(move |k| {
                    let mut u = t.clone();
                    u.push(AtomSet(k));
                    u
                })
            })
            .collect();
        traces.extend(layer.iter().cloned());
    }
    let up_to_four = traces.iter().filter(|t| t.len() <= 4).count();
    for text in CORPUS {
        let f = parse_ltlf(text).map_err(|e| e.to_string())?;
        ensure!(f.size() <= 6, "'{text}' has size {}", f.size());
        ensure!(f.atoms().len() <= 2, "'{text}' uses more than two atoms");
        let dfa = compile_dfa(&f, &atoms).map_err(|e| e.to_string())?;
        for t in &traces {
            ensure!(
                dfa.run(t).unwrap() == eval_trace_bits(&f, &atoms, t),
                "'{text}' disagrees on trace {:?}",
                t.iter().map(|s| s.0).collect::<Vec<_>>()
            );
        }
    }
    let secs = within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{} formulas x {} traces of length <= 5 (the {up_to_four} of length <= 4 included), {secs:.1}s",
        CORPUS.len(),
        traces.len()
    ))
}

fn ac4_feasible_region() -> Verdict {
    let start = Instant::now();
    let params = RandomModelParams {
        max_states: 6,
        max_cap: 4,
        ..RandomModelParams::default()
    };
    let mut total = 0;
    for seed in 0..50u64 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(4000 + seed), &params);
        let region = feasible_region(&m);
        let oracle = enumerate_feasible_paths(&m, m.num_states() * (m.cap() as usize + 1));
        let got: BTreeSet<StateId> = region.states().collect();
        let want: BTreeSet<StateId> = oracle.keys().copied().collect();
        ensure!(got == want, "seed {seed}: region {got:?} vs endpoints {want:?}");
        for s in region.states() {
            for &a in region.actions(s) {
                let c = m.choice(s, a).map_err(|e| e.to_string())?;
                for t in c.successor_union() {
                    ensure!(region.contains(t), "seed {seed}: admitted action leaves the region");
                }
            }
        }
        total += got.len();
    }
    let secs = within(start, Duration::from_secs(30))?;
    Ok(format!("50 models, {total} feasible states matched, closure holds, {secs:.1}s"))
}

fn ac5_no_exhaustion() -> Verdict {
    let start = Instant::now();
    let (m, f) = gen_warehouse(&WarehouseSpec::benchmark(4)).map_err(|e| e.to_string())?;
    let f = parse_ltlf(&f).unwrap();
    let r = synthesize(&m, Task::Formula(&f), &SynthesisConfig::default()).map_err(|e| e.to_string())?;
    let limit = 10 * r.stats.product_states;
    let mut parts = Vec::new();
    for nature in NatureKind::ALL {
        let rep = estimate(&m, &r.strategy, nature, 10_000, 5, limit).map_err(|e| e.to_string())?;
        ensure!(rep.exhaustion_count == 0, "{nature:?}: {} exhaustion events", rep.exhaustion_count);
        let bound = r.value - 3.0 * rep.confidence_halfwidth;
        ensure!(
            rep.success_rate >= bound,
            "{nature:?}: success rate {} below {bound}",
            rep.success_rate
        );
        parts.push(format!("{nature:?} {:.4}", rep.success_rate));
    }
    let secs = within(start, Duration::from_secs(60))?;
    Ok(format!(
        "value {:.4}; 0 exhaustion events; rates {}; {secs:.1}s",
        r.value,
        parts.join(", ")
    ))
}

fn random_walk(model: &Cmdpst, rng: &mut ChaCha8Rng, len: usize) -> FinitePath {
    let mut p = FinitePath::new(model.initial());
    for _ in 0..len {
        let choices = model.choices(p.last());
        if choices.is_empty() {
            break;
        }
        let c = &choices[rng.random_range(0..choices.len())];
        let o = &c.outcomes[rng.random_range(0..c.outcomes.len())];
        p.push(c.action, o.successors[rng.random_range(0..o.successors.len())]);
    }
    p
}

fn ac6_lift_project() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut feasible = 0;
    let mut infeasible = 0;
    let specs = [4, 5, 6].map(WarehouseSpec::benchmark);
    for spec in &specs {
        let (m, f) = gen_warehouse(spec).map_err(|e| e.to_string())?;
        let dfa = compile_dfa(&parse_ltlf(&f).unwrap(), m.atoms()).map_err(|e| e.to_string())?;
        let product = build_product(&m, &dfa, AcceptanceMode::Lag).map_err(|e| e.to_string())?;
        let unrolled = build_unrolled(&product);
        let pm = product.model();
        for _ in 0..500 {
            let len = rng.random_range(0..=2 * pm.cap() as usize);
            let path = random_walk(pm, &mut rng, len);
            let ok = is_feasible_path(pm, &path).map_err(|e| e.to_string())?;
            match lift_path(&product, &unrolled, &path).map_err(|e| e.to_string())? {
                Lifted::Path(lifted) => {
                    ensure!(ok, "lift succeeded on an infeasible path");
                    let back = project_path(&unrolled, &lifted).map_err(|e| e.to_string())?;
                    ensure!(back == path, "projection of the lift differs from the path");
                    feasible += 1;
                }
                Lifted::Infeasible { .. } => {
                    ensure!(!ok, "lift failed on a feasible path");
                    infeasible += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} paths on sizes 4-6 ({feasible} feasible, {infeasible} infeasible)",
        feasible + infeasible
    ))
}

fn ac7_benchmark_trend() -> Verdict {
    let reps = 3;
    let cfg = BenchConfig {
        sizes: (4..=10).collect(),
        repetitions: reps,
        ..BenchConfig::default()
    };
    let rows = run_experiment(&cfg).map_err(|e| format!("{e:#}"))?;
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("warehouse_bench.csv");
    write_csv(&rows, std::fs::File::create(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    ensure!(text.lines().count() == rows.len() + 1, "CSV row count mismatch");

    let mut summary = Vec::new();
    for n in cfg.sizes.clone() {
        let best = |p: Pipeline| {
            rows.iter()
                .filter(|r| r.n == n && r.pipeline == p)
                .map(|r| match r.result {
                    Measured::Done { states, value, millis, .. } => Ok((states, value, millis)),
                    Measured::Timeout => Err(format!("size {n} timed out")),
                })
                .try_fold((0, 0.0, f64::INFINITY), |acc, x| {
                    x.map(|(s, v, t)| (s, v, f64::min(acc.2, t)))
                })
        };
        let (naive_states, naive_value, naive_ms) = best(Pipeline::Naive)?;
        let (pruned_states, pruned_value, pruned_ms) = best(Pipeline::Pruned)?;
        ensure!((naive_value - pruned_value).abs() <= 1e-9, "size {n}: values differ");
        ensure!(pruned_states <= naive_states, "size {n}: pruned has more states");
        if n >= 6 {
            ensure!(
                pruned_ms < naive_ms,
                "size {n}: pruned {pruned_ms:.2} ms not below naive {naive_ms:.2} ms"
            );
        }
        summary.push(format!("n={n} {naive_states}/{pruned_states} states {naive_ms:.1}/{pruned_ms:.1} ms"));
    }
    Ok(format!(
        "values equal; naive/pruned (min of {reps}): {}; CSV at {}",
        summary.join(", "),
        path.display()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("AC1 pipeline equality", ac1_pipeline_equality),
        ("AC2 oracle equivalence", ac2_oracle_equivalence),
        ("AC3 LTLf/DFA agreement", ac3_dfa_correctness),
        ("AC4 feasible region", ac4_feasible_region),
        ("AC5 no exhaustion in simulation", ac5_no_exhaustion),
        ("AC6 lift/project correspondence", ac6_lift_project),
        ("AC7 benchmark trend", ac7_benchmark_trend),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
