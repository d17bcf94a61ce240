//! Monte Carlo execution of finite-memory strategies against natures.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{AtomSet, Cmdpst, FinitePath, Outcome, StateId};
use crate::product::AcceptanceMode;
use crate::synthesis::{Decision, FiniteMemoryStrategy};

/// How nature resolves a drawn successor set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NatureKind {
    /// The member with the lowest strategy value; ties go to the lowest ordinal.
    #[default]
    WorstCaseGreedy,
    /// Uniform over the set.
    Uniform,
    /// A random distribution over each set, drawn once per episode per
    /// `(state, action, set)`.
    RandomMixture,
}

impl NatureKind {
    pub const ALL: [NatureKind; 3] = [
        NatureKind::WorstCaseGreedy,
        NatureKind::Uniform,
        NatureKind::RandomMixture,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    StrategyStop,
    DeadEnd,
    StepLimit,
    /// The prescribed action cost more than the remaining resource.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeOutcome {
    pub path: FinitePath,
    /// Labels read by the strategy memory, in model atom order.
    pub trace: Vec<AtomSet>,
    pub satisfied: bool,
    pub exhausted: bool,
    pub terminated_by: Termination,
    /// Lookups that fell outside the strategy table.
    pub unmaterialized: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("strategy covers {strategy} states but the model has {model}")]
    StateCount { strategy: usize, model: usize },
    #[error("strategy prescribes an action not enabled at state '{0}'")]
    ActionNotEnabled(alloc::string::String),
    #[error("runs must be at least 1")]
    NoRuns,
}

/// Index of the outcome drawn with probability `prob` each.
fn draw_outcome(outcomes: &[Outcome], rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (i, o) in outcomes.iter().enumerate() {
        acc += o.prob;
        if r < acc {
            return i;
        }
    }
    outcomes.len() - 1
}

struct Nature {
    kind: NatureKind,
    weights: BTreeMap<(StateId, usize, usize), Vec<f64>>,
}

impl Nature {
    fn pick(
        &mut self,
        key: (StateId, usize, usize),
        set: &[StateId],
        rng: &mut ChaCha8Rng,
        value: impl Fn(StateId) -> f64,
    ) -> StateId {
        match self.kind {
            NatureKind::WorstCaseGreedy => {
                let mut best = set[0];
                let mut best_v = value(best);
                for &t in &set[1..] {
                    let v = value(t);
                    if v < best_v {
                        best = t;
                        best_v = v;
                    }
                }
                best
            }
            NatureKind::Uniform => set[rng.random_range(0..set.len())],
            NatureKind::RandomMixture => {
                let w = self
                    .weights
                    .entry(key)
                    .or_insert_with(|| (0..set.len()).map(|_| rng.random::<f64>() + 1e-3).collect());
                let total: f64 = w.iter().sum();
                let mut r = rng.random::<f64>() * total;
                for (i, &x) in w.iter().enumerate() {
                    if r < x {
                        return set[i];
                    }
                    r -= x;
                }
                set[set.len() - 1]
            }
        }
    }
}

/// Runs one episode from the initial state.
///
/// The episode ends when the strategy stops, when it has no affordable
/// action left, or after `step_limit` actions. `satisfied` replays the read
/// labels through the strategy's DFA: in lag mode the label of the final
/// state is not read, in lookahead mode it is.
pub fn run_episode(
    model: &Cmdpst,
    strategy: &FiniteMemoryStrategy,
    nature: NatureKind,
    seed: u64,
    step_limit: usize,
) -> Result<EpisodeOutcome, SimError> {
    if strategy.num_model_states() != model.num_states() {
        return Err(SimError::StateCount {
            strategy: strategy.num_model_states(),
            model: model.num_states(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nature = Nature {
        kind: nature,
        weights: BTreeMap::new(),
    };
    let mut s = model.initial();
    let mut mem = strategy.initial_memory();
    let mut path = FinitePath::new(s);
    let mut trace = Vec::new();
    let mut unmaterialized = 0;

    let terminated_by = loop {
        let lookup = strategy.decide(s, mem);
        if !lookup.materialized {
            unmaterialized += 1;
        }
        let a = match lookup.decision {
            Decision::Stop => {
                let stuck = !strategy.is_accepting(s, mem)
                    && model.choices(s).iter().all(|c| c.cost > mem.level);
                break if stuck { Termination::DeadEnd } else { Termination::StrategyStop };
            }
            Decision::Act(a) => a,
        };
        if path.len() >= step_limit {
            break Termination::StepLimit;
        }
        let choice = model
            .choice(s, a)
            .map_err(|_| SimError::ActionNotEnabled(model.state_name(s).into()))?;
        if choice.cost > mem.level {
            break Termination::Exhausted;
        }
        let oi = draw_outcome(&choice.outcomes, &mut rng);
        let set = &choice.outcomes[oi].successors;
        let value = |t: StateId| {
            strategy
                .next_memory(s, mem, choice.cost, t)
                .map_or(0.0, |m2| strategy.value_at(t, m2))
        };
        let next = nature.pick((s, a.0, oi), set, &mut rng, value);
        trace.push(model.label(s));
        mem = strategy
            .next_memory(s, mem, choice.cost, next)
            .expect("affordability was checked");
        path.push(a, next);
        s = next;
    };

    let exhausted = terminated_by == Termination::Exhausted;
    let mut word = trace.clone();
    if strategy.mode() == AcceptanceMode::Lookahead {
        word.push(model.label(s));
    }
    let dfa = strategy.dfa();
    let symbols: Vec<AtomSet> = word
        .iter()
        .map(|&l| dfa.translate(model.atoms(), l).expect("strategy matches model"))
        .collect();
    let satisfied = !exhausted && dfa.run(&symbols).expect("translated symbols are in range");
    Ok(EpisodeOutcome {
        path,
        trace,
        satisfied,
        exhausted,
        terminated_by,
        unmaterialized,
    })
}

/// Aggregate of many episodes.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub exhaustion_count: usize,
    /// Episodes cut off by the step limit; never counted as successes.
    pub truncated: usize,
    pub mean_path_length: f64,
    /// Half-width of the 95% Wilson score interval.
    pub confidence_halfwidth: f64,
}

/// Half-width of the Wilson score interval at `z`.
pub fn wilson_halfwidth(successes: usize, runs: usize, z: f64) -> f64 {
    let n = runs as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n)
}

/// Runs `runs` episodes; episode `i` is seeded with `seed ^ i`.
pub fn estimate(
    model: &Cmdpst,
    strategy: &FiniteMemoryStrategy,
    nature: NatureKind,
    runs: usize,
    seed: u64,
    step_limit: usize,
) -> Result<EstimateReport, SimError> {
    if runs == 0 {
        return Err(SimError::NoRuns);
    }
    let mut successes = 0;
    let mut exhaustion_count = 0;
    let mut truncated = 0;
    let mut total_len = 0usize;
    for i in 0..runs {
        let ep = run_episode(model, strategy, nature, seed ^ i as u64, step_limit)?;
        total_len += ep.path.len();
        match ep.terminated_by {
            Termination::StepLimit => truncated += 1,
            Termination::Exhausted => exhaustion_count += 1,
            _ if ep.satisfied => successes += 1,
            _ => {}
        }
    }
    Ok(EstimateReport {
        runs,
        successes,
        success_rate: successes as f64 / runs as f64,
        exhaustion_count,
        truncated,
        mean_path_length: total_len as f64 / runs as f64,
        confidence_halfwidth: wilson_halfwidth(successes, runs, 1.96),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::Formula;
    use crate::model::fixtures::*;
    use crate::synthesis::{synthesize, SynthesisConfig, Task};
    use alloc::vec;

    #[test]
    fn stop_at_start() {
        let m = chain(3, 2, &[]);
        let r = synthesize(&m, Task::Formula(&Formula::True), &SynthesisConfig::default()).unwrap();
        let ep = run_episode(&m, &r.strategy, NatureKind::Uniform, 1, 10).unwrap();
        assert!(ep.satisfied);
        assert_eq!(ep.path.len(), 0);
        assert_eq!(ep.terminated_by, Termination::StrategyStop);
    }

    #[test]
    fn zero_step_limit() {
        let mut d = skeleton(&["a", "b"], &["go"], 2);
        d.atoms = vec![s("Wd")];
        d.labels.insert(s("b"), vec![s("Wd")]);
        edge(&mut d, "a", "go", 1, vec![outcome(1.0, &["b"])]);
        edge(&mut d, "b", "go", 0, vec![outcome(1.0, &["b"])]);
        let m = crate::model::Cmdpst::from_description(&d).unwrap();
        let f = crate::ltlf::parse_ltlf("F Wd").unwrap();
        let r = synthesize(&m, Task::Formula(&f), &SynthesisConfig::default()).unwrap();
        assert_eq!(r.value, 1.0);
        let ep = run_episode(&m, &r.strategy, NatureKind::Uniform, 1, 0).unwrap();
        assert_eq!(ep.terminated_by, Termination::StepLimit);
        assert!(!ep.satisfied);
        let rep = estimate(&m, &r.strategy, NatureKind::WorstCaseGreedy, 50, 7, 100).unwrap();
        assert_eq!(rep.success_rate, 1.0);
        assert_eq!(rep.exhaustion_count, 0);
        assert!((rep.mean_path_length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unsatisfiable_task_never_succeeds() {
        let m = chain(3, 2, &[]);
        let r = synthesize(&m, Task::Formula(&Formula::False), &SynthesisConfig::default()).unwrap();
        let rep = estimate(&m, &r.strategy, NatureKind::Uniform, 20, 3, 100).unwrap();
        assert_eq!(rep.success_rate, 0.0);
    }

    #[test]
    fn wilson_limits() {
        assert!(wilson_halfwidth(0, 10_000, 1.96) < 2e-4);
        let h = wilson_halfwidth(5_000, 10_000, 1.96);
        assert!((h - 0.0098).abs() < 1e-4);
    }
}
