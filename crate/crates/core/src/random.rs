//! Seeded random instances for property tests and benchmarks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::model::{
    ActionId, Choice, Cmdpst, Mdpst, ModelDescription, Outcome, OutcomeDescription, StateId,
    TransitionDescription,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomModelParams {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_cost: u32,
    pub max_cap: u32,
    pub max_outcomes: usize,
    pub max_set_size: usize,
    pub reload_prob: f64,
}

impl Default for RandomModelParams {
    fn default() -> Self {
        RandomModelParams {
            max_states: 8,
            max_actions: 3,
            max_cost: 3,
            max_cap: 6,
            max_outcomes: 3,
            max_set_size: 3,
            reload_prob: 0.2,
        }
    }
}

/// Distinct random successor sets with positive probabilities summing to 1.
fn random_outcomes<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_outcomes: usize,
    max_set_size: usize,
) -> Vec<(f64, BTreeSet<usize>)> {
    let k = rng.random_range(1..=max_outcomes);
    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    for _ in 0..4 * k {
        if sets.len() == k {
            break;
        }
        let size = rng.random_range(1..=max_set_size.min(n));
        let set: BTreeSet<usize> = (0..size).map(|_| rng.random_range(0..n)).collect();
        if !sets.contains(&set) {
            sets.push(set);
        }
    }
    let weights: Vec<f64> = sets.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    sets.into_iter().zip(weights).map(|(s, w)| (w / total, s)).collect()
}

/// Random model over atoms `Wd` and `Wo` with states `s0, s1, …`.
pub fn random_cmdpst<R: Rng + ?Sized>(rng: &mut R, params: &RandomModelParams) -> Cmdpst {
    let n = rng.random_range(1..=params.max_states);
    let k = rng.random_range(1..=params.max_actions);
    let name = |i: usize| format!("s{i}");
    let mut desc = ModelDescription {
        states: (0..n).map(name).collect(),
        initial: name(0),
        atoms: ["Wd", "Wo"].iter().map(|a| a.to_string()).collect(),
        actions: (0..k).map(|a| format!("a{a}")).collect(),
        cap: rng.random_range(0..=params.max_cap),
        ..ModelDescription::default()
    };
    let mut enabled: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for i in 0..n {
        let mut label = Vec::new();
        if rng.random_bool(0.25) {
            label.push("Wd".to_string());
        }
        if rng.random_bool(0.2) {
            label.push("Wo".to_string());
        }
        if !label.is_empty() {
            desc.labels.insert(name(i), label);
        }
        if rng.random_bool(params.reload_prob) {
            desc.reload.push(name(i));
        }
        let mut here = Vec::new();
        for a in 0..k {
            if !rng.random_bool(0.8) {
                continue;
            }
            let action = format!("a{a}");
            let outcomes = random_outcomes(rng, n, params.max_outcomes, params.max_set_size)
                .into_iter()
                .map(|(prob, set)| OutcomeDescription {
                    prob,
                    set: set.into_iter().map(name).collect(),
                })
                .collect();
            desc.transitions.push(TransitionDescription {
                from: name(i),
                action: action.clone(),
                outcomes,
            });
            desc.costs
                .entry(name(i))
                .or_default()
                .insert(action.clone(), rng.random_range(0..=params.max_cost));
            here.push(action);
        }
        enabled.insert(name(i), here);
    }
    desc.enabled = Some(enabled);
    Cmdpst::from_description(&desc).expect("generator emits valid models")
}

/// Random MDPST within the default oracle limits (at most 6 states, 2
/// actions, 2 successor sets of size 2) and a nonempty target vector.
pub fn random_tiny_mdpst<R: Rng + ?Sized>(rng: &mut R) -> (Mdpst, Vec<bool>) {
    let n = rng.random_range(2..=6);
    let mut choices = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.random_range(0..=2);
        let row: Vec<Choice> = (0..k)
            .map(|a| Choice {
                action: ActionId(a),
                cost: 0,
                outcomes: random_outcomes(rng, n, 2, 2)
                    .into_iter()
                    .map(|(prob, set)| Outcome {
                        prob,
                        successors: set.into_iter().map(StateId).collect(),
                    })
                    .collect(),
            })
            .collect();
        choices.push(row);
    }
    let mut targets: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
    if !targets.iter().any(|&t| t) {
        let t = rng.random_range(1..n);
        targets[t] = true;
    }
    (Mdpst::new(StateId(0), choices), targets)
}
