//! Max-min reachability on the unrolled model and strategy extraction.
//!
//! Values are computed by Jacobi value iteration starting from the
//! indicator of the winning set, which converges from below to the least
//! fixed point of the robust Bellman operator. Extraction picks, among
//! value-optimal actions, one that makes progress towards the targets even
//! when nature resolves every successor set adversarially; without that
//! restriction an optimal-valued self-loop could be chosen forever.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::feasibility::{prune_product, PruneReport};
use crate::ltlf::{compile_dfa, Dfa, DfaError, DfaState, Formula};
use crate::model::{ActionId, AtomSet, Cmdpst, Mdpst, StateId};
use crate::product::{build_product, translated_labels, AcceptanceMode, ProductCmdpst, ProductError};
use crate::unroll::{build_unrolled, build_unrolled_grid, UnrolledMdpst};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub epsilon: f64,
    pub max_sweeps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: 1e-10,
            max_sweeps: 100_000,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SynthesisError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("winning set has {found} entries for {expected} states")]
    WinningLength { expected: usize, found: usize },
    #[error("winning set omits target state {0:?}")]
    WinningMissesTarget(StateId),
    #[error("value iteration did not converge: residual {residual:e} after {sweeps} sweeps")]
    NotConverged { residual: f64, sweeps: usize },
    #[error("aborted")]
    Aborted,
    #[error("beta must lie in [0, 1], got {0}")]
    InvalidBeta(f64),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error("strategy entry refers to unknown state {0:?}")]
    UnknownState(StateId),
}

/// Worst-case reachability probability per unrolled state.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueFunction {
    values: Vec<f64>,
    sweeps: usize,
    residual: f64,
}

impl ValueFunction {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, s: StateId) -> f64 {
        self.values[s.0]
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// One Jacobi sweep; returns the max-norm change.
fn sweep(m: &Mdpst, winning: &[bool], old: &[f64], new: &mut [f64]) -> f64 {
    let mut residual = 0.0f64;
    for s in m.states() {
        let v = if winning[s.0] {
            1.0
        } else {
            m.choices(s)
                .iter()
                .map(|c| c.robust_expectation(old))
                .fold(0.0f64, f64::max)
                .min(1.0)
        };
        residual = residual.max((v - old[s.0]).abs());
        new[s.0] = v;
    }
    residual
}

/// Value iteration on a bare structure. `abort` is polled once per sweep.
pub fn robust_values(
    m: &Mdpst,
    winning: &[bool],
    opts: SolveOptions,
    abort: &mut dyn FnMut() -> bool,
) -> Result<ValueFunction, SynthesisError> {
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
        return Err(SynthesisError::InvalidEpsilon(opts.epsilon));
    }
    if winning.len() != m.num_states() {
        return Err(SynthesisError::WinningLength {
            expected: m.num_states(),
            found: winning.len(),
        });
    }
    let mut v: Vec<f64> = winning.iter().map(|&w| if w { 1.0 } else { 0.0 }).collect();
    let mut next = vec![0.0; v.len()];
    let mut residual = f64::INFINITY;
    for sweeps in 1..=opts.max_sweeps {
        if abort() {
            return Err(SynthesisError::Aborted);
        }
        residual = sweep(m, winning, &v, &mut next);
        core::mem::swap(&mut v, &mut next);
        if residual <= opts.epsilon {
            return Ok(ValueFunction {
                values: v,
                sweeps,
                residual,
            });
        }
    }
    Err(SynthesisError::NotConverged {
        residual,
        sweeps: opts.max_sweeps,
    })
}

/// Value iteration on an unrolled model. `winning` defaults to the targets
/// and must contain them.
pub fn robust_value_iteration(
    unrolled: &UnrolledMdpst,
    winning: Option<&[bool]>,
    opts: SolveOptions,
) -> Result<ValueFunction, SynthesisError> {
    let winning = winning.unwrap_or(unrolled.targets());
    if winning.len() != unrolled.num_states() {
        return Err(SynthesisError::WinningLength {
            expected: unrolled.num_states(),
            found: winning.len(),
        });
    }
    if let Some(t) = (0..winning.len()).find(|&i| unrolled.targets()[i] && !winning[i]) {
        return Err(SynthesisError::WinningMissesTarget(StateId(t)));
    }
    robust_values(unrolled.structure(), winning, opts, &mut || false)
}

/// An action or the termination symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Stop,
    Act(ActionId),
}

const RELATIVE_TOLERANCE: f64 = 1e-8;

/// Memoryless decisions for every state of `m`.
///
/// Targets, zero-valued states and states without actions stop. Elsewhere
/// the choice is restricted to actions within tolerance of the best robust
/// expectation; among them the one that reaches a lower progress rank
/// wins, then the lowest ordinal. A state's rank is one more than the
/// largest rank nature can force inside some positive-probability successor
/// set while picking only value-minimizing successors.
pub fn extract_decisions(m: &Mdpst, targets: &[bool], values: &[f64]) -> Vec<Decision> {
    let n = m.num_states();
    let scale = values.iter().copied().fold(0.0f64, f64::max);
    let tol = RELATIVE_TOLERANCE * scale;

    // Optimal choice indices per state, and the argmin members of each of their outcomes.
    let mut optimal: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pending: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    let mut watchers: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for s in m.states() {
        if targets[s.0] || values[s.0] <= 0.0 || m.choices(s).is_empty() {
            continue;
        }
        let q: Vec<f64> = m.choices(s).iter().map(|c| c.robust_expectation(values)).collect();
        let best = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (ci, c) in m.choices(s).iter().enumerate() {
            if q[ci] < best - tol {
                continue;
            }
            optimal[s.0].push(ci);
            let mut per_outcome = Vec::with_capacity(c.outcomes.len());
            for (oi, o) in c.outcomes.iter().enumerate() {
                let low = o
                    .successors
                    .iter()
                    .map(|t| values[t.0])
                    .fold(f64::INFINITY, f64::min);
                let argmin: Vec<StateId> = o
                    .successors
                    .iter()
                    .copied()
                    .filter(|t| values[t.0] <= low + tol)
                    .collect();
                for t in &argmin {
                    watchers[t.0].push((s.0, ci, oi));
                }
                per_outcome.push(if o.prob > 0.0 { argmin.len() } else { usize::MAX });
            }
            pending[s.0].push(per_outcome);
        }
    }

    let mut ranked = vec![false; n];
    let mut choice_of: Vec<Option<ActionId>> = vec![None; n];
    let mut frontier: Vec<StateId> = m.states().filter(|s| targets[s.0]).collect();
    for s in &frontier {
        ranked[s.0] = true;
    }
    while !frontier.is_empty() {
        let mut candidates = Vec::new();
        for t in &frontier {
            for &(s, ci, oi) in &watchers[t.0] {
                if ranked[s] {
                    continue;
                }
                let slot = optimal[s].iter().position(|&x| x == ci).expect("watched choice is optimal");
                let left = &mut pending[s][slot][oi];
                *left -= 1;
                if *left == 0 {
                    candidates.push(s);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut next = Vec::new();
        for s in candidates {
            let slot = pending[s]
                .iter()
                .position(|outs| outs.contains(&0))
                .expect("candidate has a completed outcome");
            choice_of[s] = Some(m.choices(StateId(s))[optimal[s][slot]].action);
            ranked[s] = true;
            next.push(StateId(s));
        }
        frontier = next;
    }

    m.states()
        .map(|s| {
            if targets[s.0] || values[s.0] <= 0.0 || m.choices(s).is_empty() {
                Decision::Stop
            } else if let Some(a) = choice_of[s.0] {
                Decision::Act(a)
            } else {
                Decision::Act(m.choices(s)[optimal[s.0][0]].action)
            }
        })
        .collect()
}

/// Memoryless decisions on the unrolled model.
pub fn extract_strategy(unrolled: &UnrolledMdpst, values: &ValueFunction) -> Vec<Decision> {
    extract_decisions(unrolled.structure(), unrolled.targets(), values.values())
}

/// Strategy memory: DFA state and remaining resource.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Memory {
    pub dfa: DfaState,
    pub level: u32,
}

/// Answer of a strategy lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lookup {
    pub decision: Decision,
    /// False when `(state, memory)` had no table entry and the answer
    /// defaulted to stopping.
    pub materialized: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyEntry {
    pub state: StateId,
    pub memory: Memory,
    pub decision: Decision,
    pub value: f64,
}

/// A strategy on the original model with memory `(DFA state, level)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMemoryStrategy {
    dfa: Dfa,
    symbols: Vec<AtomSet>,
    reload: Vec<bool>,
    cap: u32,
    mode: AcceptanceMode,
    table: BTreeMap<(StateId, Memory), (Decision, f64)>,
    value: f64,
}

impl FiniteMemoryStrategy {
    /// Assembles a strategy for `model` from explicit table entries.
    pub fn new(
        model: &Cmdpst,
        dfa: Dfa,
        mode: AcceptanceMode,
        entries: impl IntoIterator<Item = StrategyEntry>,
        value: f64,
    ) -> Result<FiniteMemoryStrategy, SynthesisError> {
        let symbols = translated_labels(model, &dfa)?;
        let mut table = BTreeMap::new();
        for e in entries {
            if e.state.0 >= model.num_states() {
                return Err(SynthesisError::UnknownState(e.state));
            }
            table.insert((e.state, e.memory), (e.decision, e.value));
        }
        Ok(FiniteMemoryStrategy {
            dfa,
            symbols,
            reload: model.states().map(|s| model.is_reload(s)).collect(),
            cap: model.cap(),
            mode,
            table,
            value,
        })
    }

    pub fn initial_memory(&self) -> Memory {
        Memory {
            dfa: self.dfa.initial(),
            level: self.cap,
        }
    }

    /// Worst-case satisfaction probability from the initial configuration.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn mode(&self) -> AcceptanceMode {
        self.mode
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Number of model states the strategy was built for.
    pub fn num_model_states(&self) -> usize {
        self.symbols.len()
    }

    /// True once the task is fulfilled at `s` under memory `m`.
    pub fn is_accepting(&self, s: StateId, m: Memory) -> bool {
        match self.mode {
            AcceptanceMode::Lag => self.dfa.is_accepting(m.dfa),
            AcceptanceMode::Lookahead => self.dfa.is_accepting(self.dfa_after(s, m)),
        }
    }

    fn dfa_after(&self, s: StateId, m: Memory) -> DfaState {
        self.dfa
            .step(m.dfa, self.symbols[s.0])
            .expect("labels were translated into the DFA alphabet")
    }

    pub fn decide(&self, s: StateId, m: Memory) -> Lookup {
        if self.is_accepting(s, m) {
            return Lookup {
                decision: Decision::Stop,
                materialized: true,
            };
        }
        match self.table.get(&(s, m)) {
            Some(&(decision, _)) => Lookup {
                decision,
                materialized: true,
            },
            None => Lookup {
                decision: Decision::Stop,
                materialized: false,
            },
        }
    }

    /// Robust value of `(s, m)`; unknown configurations are worth 0.
    pub fn value_at(&self, s: StateId, m: Memory) -> f64 {
        match self.table.get(&(s, m)) {
            Some(&(_, v)) => v,
            None if self.is_accepting(s, m) => 1.0,
            None => 0.0,
        }
    }

    /// Memory after playing an action of cost `cost` at `s` and landing in
    /// `next`; `None` if the action is unaffordable.
    pub fn next_memory(&self, s: StateId, m: Memory, cost: u32, next: StateId) -> Option<Memory> {
        let left = m.level.checked_sub(cost)?;
        Some(Memory {
            dfa: self.dfa_after(s, m),
            level: if self.reload[next.0] { self.cap } else { left },
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = StrategyEntry> + '_ {
        self.table
            .iter()
            .map(|(&(state, memory), &(decision, value))| StrategyEntry {
                state,
                memory,
                decision,
                value,
            })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Wraps unrolled decisions as a finite-memory strategy on `model`.
pub fn lift_strategy(
    model: &Cmdpst,
    dfa: &Dfa,
    product: &ProductCmdpst,
    unrolled: &UnrolledMdpst,
    decisions: &[Decision],
    values: &ValueFunction,
) -> Result<FiniteMemoryStrategy, SynthesisError> {
    let entries = unrolled.structure().states().map(|u| {
        let (ps, level) = unrolled.origin(u);
        let (state, q) = product.origin(ps);
        StrategyEntry {
            state,
            memory: Memory { dfa: q, level },
            decision: decisions[u.0],
            value: values.value(u),
        }
    });
    FiniteMemoryStrategy::new(
        model,
        dfa.clone(),
        product.mode(),
        entries,
        values.value(unrolled.initial()),
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Pipeline {
    /// Product, full level grid, value iteration.
    Naive,
    /// Product, feasibility pruning, reachable unrolling, value iteration.
    #[default]
    Pruned,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SynthesisConfig {
    pub pipeline: Pipeline,
    pub mode: AcceptanceMode,
    pub solve: SolveOptions,
}

/// The task: a formula compiled over the model's atoms, or a ready DFA.
#[derive(Clone, Copy, Debug)]
pub enum Task<'a> {
    Formula(&'a Formula),
    Dfa(&'a Dfa),
}

/// Monotonic time source in microseconds.
pub trait Clock {
    fn now_micros(&self) -> u64;
}

/// A clock that never advances.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_micros(&self) -> u64 {
        0
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SynthesisStats {
    pub dfa_states: usize,
    pub product_states: usize,
    pub product_transitions: usize,
    pub prune: Option<PruneReport>,
    pub unrolled_states: usize,
    pub unrolled_transitions: usize,
    pub sweeps: usize,
    pub residual: f64,
    /// `(stage, microseconds)` in execution order.
    pub stages: Vec<(&'static str, u64)>,
}

impl SynthesisStats {
    pub fn total_micros(&self) -> u64 {
        self.stages.iter().map(|&(_, t)| t).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub strategy: FiniteMemoryStrategy,
    pub value: f64,
    pub values: ValueFunction,
    pub decisions: Vec<Decision>,
    pub stats: SynthesisStats,
    pub dfa: Dfa,
    /// The product that was unrolled (after pruning, for the pruned pipeline).
    pub product: ProductCmdpst,
    pub unrolled: UnrolledMdpst,
}

pub fn synthesize(
    model: &Cmdpst,
    task: Task<'_>,
    config: &SynthesisConfig,
) -> Result<SynthesisResult, SynthesisError> {
    synthesize_with(model, task, config, &NoClock, &mut || false)
}

/// [`synthesize`] with stage timing and cooperative cancellation.
pub fn synthesize_with(
    model: &Cmdpst,
    task: Task<'_>,
    config: &SynthesisConfig,
    clock: &dyn Clock,
    abort: &mut dyn FnMut() -> bool,
) -> Result<SynthesisResult, SynthesisError> {
    let mut stats = SynthesisStats::default();
    let mut mark = clock.now_micros();
    let mut lap = |stats: &mut SynthesisStats, stage: &'static str| {
        let now = clock.now_micros();
        stats.stages.push((stage, now.saturating_sub(mark)));
        mark = now;
    };

    let dfa = match task {
        Task::Formula(f) => compile_dfa(f, model.atoms())?,
        Task::Dfa(d) => d.clone(),
    };
    stats.dfa_states = dfa.num_states();
    lap(&mut stats, "compile");

    let mut product = build_product(model, &dfa, config.mode)?;
    stats.product_states = product.num_states();
    stats.product_transitions = product.model().transition_count();
    lap(&mut stats, "product");

    let unrolled = match config.pipeline {
        Pipeline::Naive => build_unrolled_grid(&product),
        Pipeline::Pruned => {
            let (pruned, report) = prune_product(&product);
            stats.prune = Some(report);
            product = pruned;
            lap(&mut stats, "prune");
            build_unrolled(&product)
        }
    };
    stats.unrolled_states = unrolled.num_states();
    stats.unrolled_transitions = unrolled.transition_count();
    lap(&mut stats, "unroll");
    if abort() {
        return Err(SynthesisError::Aborted);
    }

    let values = robust_values(unrolled.structure(), unrolled.targets(), config.solve, abort)?;
    stats.sweeps = values.sweeps();
    stats.residual = values.residual();
    lap(&mut stats, "solve");

    let decisions = extract_strategy(&unrolled, &values);
    let strategy = lift_strategy(model, &dfa, &product, &unrolled, &decisions, &values)?;
    lap(&mut stats, "extract");

    Ok(SynthesisResult {
        value: values.value(unrolled.initial()),
        strategy,
        values,
        decisions,
        stats,
        dfa,
        product,
        unrolled,
    })
}

/// Whether `value` meets the threshold `beta`.
pub fn check_beta(value: f64, beta: f64) -> Result<bool, SynthesisError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(SynthesisError::InvalidBeta(beta));
    }
    Ok(value >= beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{Choice, Outcome};

    fn choice(a: usize, outcomes: &[(f64, &[usize])]) -> Choice {
        Choice {
            action: ActionId(a),
            cost: 0,
            outcomes: outcomes
                .iter()
                .map(|&(prob, set)| Outcome {
                    prob,
                    successors: set.iter().map(|&i| StateId(i)).collect(),
                })
                .collect(),
        }
    }

    /// s=0 with a: {{g,b}}, a': {{g}:0.5, {b}:0.5}; g=1 target, b=2 dead end.
    fn two_action() -> (Mdpst, Vec<bool>) {
        let m = Mdpst::new(
            StateId(0),
            vec![
                vec![choice(0, &[(1.0, &[1, 2])]), choice(1, &[(0.5, &[1]), (0.5, &[2])])],
                vec![],
                vec![],
            ],
        );
        (m, vec![false, true, false])
    }

    #[test]
    fn two_action_value_and_choice() {
        let (m, w) = two_action();
        let v = robust_values(&m, &w, SolveOptions::default(), &mut || false).unwrap();
        assert_eq!(v.values(), &[0.5, 1.0, 0.0]);
        let d = extract_decisions(&m, &w, v.values());
        assert_eq!(d, vec![Decision::Act(ActionId(1)), Decision::Stop, Decision::Stop]);
    }

    #[test]
    fn self_loop_with_equal_value_is_not_chosen() {
        // Action 0 loops at value 1; action 1 reaches the target surely.
        let m = Mdpst::new(
            StateId(0),
            vec![vec![choice(0, &[(1.0, &[0])]), choice(1, &[(1.0, &[1])])], vec![]],
        );
        let w = vec![false, true];
        let v = robust_values(&m, &w, SolveOptions::default(), &mut || false).unwrap();
        assert_eq!(v.value(StateId(0)), 1.0);
        assert_eq!(extract_decisions(&m, &w, v.values())[0], Decision::Act(ActionId(1)));
    }

    #[test]
    fn ties_prefer_the_lower_ordinal() {
        let m = Mdpst::new(
            StateId(0),
            vec![vec![choice(0, &[(1.0, &[1])]), choice(1, &[(1.0, &[1])])], vec![]],
        );
        let w = vec![false, true];
        let v = robust_values(&m, &w, SolveOptions::default(), &mut || false).unwrap();
        assert_eq!(extract_decisions(&m, &w, v.values())[0], Decision::Act(ActionId(0)));
    }

    #[test]
    fn zero_value_and_dead_ends_stop() {
        let m = Mdpst::new(StateId(0), vec![vec![choice(0, &[(1.0, &[1])])], vec![]]);
        let w = vec![false, false];
        let v = robust_values(&m, &w, SolveOptions::default(), &mut || false).unwrap();
        assert_eq!(v.values(), &[0.0, 0.0]);
        assert_eq!(extract_decisions(&m, &w, v.values()), vec![Decision::Stop; 2]);
    }

    #[test]
    fn iterates_are_monotone_and_bounded() {
        let m = Mdpst::new(
            StateId(0),
            vec![
                vec![choice(0, &[(0.5, &[0]), (0.5, &[1, 2])]), choice(1, &[(0.9, &[0]), (0.1, &[2])])],
                vec![choice(0, &[(0.3, &[0]), (0.7, &[2])])],
                vec![],
            ],
        );
        let w = vec![false, false, true];
        let mut v: Vec<f64> = w.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let mut next = vec![0.0; 3];
        for _ in 0..200 {
            sweep(&m, &w, &v, &mut next);
            for i in 0..3 {
                assert!(next[i] >= v[i] && next[i] <= 1.0);
            }
            core::mem::swap(&mut v, &mut next);
        }
    }

    #[test]
    fn bad_inputs() {
        let (m, w) = two_action();
        let opts = SolveOptions { epsilon: 0.0, ..Default::default() };
        assert!(matches!(
            robust_values(&m, &w, opts, &mut || false),
            Err(SynthesisError::InvalidEpsilon(_))
        ));
        let opts = SolveOptions { max_sweeps: 0, ..Default::default() };
        assert!(matches!(
            robust_values(&m, &w, opts, &mut || false),
            Err(SynthesisError::NotConverged { .. })
        ));
        assert!(matches!(
            robust_values(&m, &w, SolveOptions::default(), &mut || true),
            Err(SynthesisError::Aborted)
        ));
    }

    #[test]
    fn beta_checks() {
        assert!(check_beta(0.883, 0.8).unwrap());
        assert!(check_beta(0.0, 0.0).unwrap());
        assert!(!check_beta(0.99, 1.0).unwrap());
        assert!(check_beta(0.5, 1.5).is_err());
    }

    #[test]
    fn true_task_stops_immediately() {
        let m = chain(3, 2, &[]);
        let r = synthesize(&m, Task::Formula(&Formula::True), &SynthesisConfig::default()).unwrap();
        assert_eq!(r.value, 1.0);
        let lookup = r.strategy.decide(m.initial(), r.strategy.initial_memory());
        assert_eq!(lookup.decision, Decision::Stop);
    }

    #[test]
    fn memory_updates() {
        // 2 --RIGHT(2)--> 7 (reload) or 5, cap 5.
        let mut d = skeleton(&["2", "5", "7"], &["RIGHT"], 5);
        edge(&mut d, "2", "RIGHT", 2, vec![outcome(1.0, &["7", "5"])]);
        d.reload = vec![s("7")];
        let m = crate::model::Cmdpst::from_description(&d).unwrap();
        let r = synthesize(&m, Task::Formula(&Formula::True), &SynthesisConfig::default()).unwrap();
        let st = &r.strategy;
        let m0 = st.initial_memory();
        assert_eq!(m0.level, 5);
        assert_eq!(st.next_memory(StateId(0), m0, 2, StateId(1)).unwrap().level, 3);
        assert_eq!(st.next_memory(StateId(0), m0, 2, StateId(2)).unwrap().level, 5);
        assert!(st.next_memory(StateId(0), Memory { level: 1, ..m0 }, 2, StateId(1)).is_none());
    }
}
