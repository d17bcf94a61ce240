//! Explicit-state CMDPST models.
//!
//! A [`Cmdpst`] is an MDP whose state-action pairs map to a probability
//! distribution over *sets* of successors, extended with integer action
//! costs, reload states and a resource capacity. Models are built from a
//! name-based [`ModelDescription`] (the on-disk JSON shape) and are
//! immutable afterwards; all lookups go through dense ordinals.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Tolerance on outcome probability sums.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Largest supported atomic-proposition count (the DFA alphabet is `2^atoms`).
pub const MAX_ATOMS: usize = 16;

/// Ordinal of a state in its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Ordinal of an action name in its model's action list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// A set of atomic propositions, as a bitmask over an ordered atom list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet(pub u32);

impl AtomSet {
    pub const EMPTY: AtomSet = AtomSet(0);

    #[inline]
    pub fn contains(self, atom: usize) -> bool {
        atom < 32 && self.0 & (1 << atom) != 0
    }

    #[inline]
    pub fn with(self, atom: usize) -> AtomSet {
        AtomSet(self.0 | (1 << atom))
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Builds a set from atom names resolved against `atoms`.
    pub fn from_names<S: AsRef<str>>(atoms: &[String], names: &[S]) -> Result<AtomSet, String> {
        let mut set = AtomSet::EMPTY;
        for name in names {
            let name = name.as_ref();
            match atoms.iter().position(|a| a == name) {
                Some(i) => set = set.with(i),
                None => return Err(name.to_string()),
            }
        }
        Ok(set)
    }

    pub fn names(self, atoms: &[String]) -> Vec<String> {
        self.iter()
            .filter(|&i| i < atoms.len())
            .map(|i| atoms[i].clone())
            .collect()
    }
}

/// One probabilistic branch of a state-action pair: with probability
/// `prob` the adversary picks the successor from `successors`.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub prob: f64,
    /// Sorted, duplicate-free, nonempty.
    pub successors: Vec<StateId>,
}

/// An enabled action at a state together with its cost and outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub action: ActionId,
    pub cost: u32,
    pub outcomes: Vec<Outcome>,
}

impl Choice {
    /// `Σ_Θ T(Θ) · min_{s'∈Θ} v(s')`: the worst case over all feasible
    /// distributions of the pair, attained by nature putting all mass of
    /// each set on its minimizer.
    pub fn robust_expectation(&self, values: &[f64]) -> f64 {
        self.outcomes
            .iter()
            .map(|o| {
                let worst = o
                    .successors
                    .iter()
                    .map(|s| values[s.0])
                    .fold(f64::INFINITY, f64::min);
                o.prob * worst
            })
            .sum()
    }

    /// Union of all successor sets.
    pub fn successor_union(&self) -> BTreeSet<StateId> {
        self.outcomes
            .iter()
            .flat_map(|o| o.successors.iter().copied())
            .collect()
    }

    /// Number of (outcome, successor) edges.
    pub fn edge_count(&self) -> usize {
        self.outcomes.iter().map(|o| o.successors.len()).sum()
    }

    /// True if `next` is a possible successor with positive probability.
    pub fn can_reach(&self, next: StateId) -> bool {
        self.outcomes
            .iter()
            .any(|o| o.prob > 0.0 && o.successors.binary_search(&next).is_ok())
    }
}

/// Transition structure shared by every model layer: the original CMDPST,
/// the product, and the unrolled MDPST.
#[derive(Clone, Debug, PartialEq)]
pub struct Mdpst {
    initial: StateId,
    /// Per state, enabled choices sorted by action ordinal.
    choices: Vec<Vec<Choice>>,
}

impl Mdpst {
    /// Builds a structure from explicit per-state choices. Choices are
    /// sorted by action and successor sets normalized.
    pub fn new(initial: StateId, mut choices: Vec<Vec<Choice>>) -> Mdpst {
        for row in &mut choices {
            row.sort_by_key(|c| c.action);
            for choice in row.iter_mut() {
                for outcome in &mut choice.outcomes {
                    outcome.successors.sort_unstable();
                    outcome.successors.dedup();
                }
            }
        }
        Mdpst { initial, choices }
    }

    #[inline]
    pub fn initial(&self) -> StateId {
        self.initial
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.choices.len()
    }

    #[inline]
    pub fn choices(&self, s: StateId) -> &[Choice] {
        &self.choices[s.0]
    }

    pub fn choice(&self, s: StateId, a: ActionId) -> Option<&Choice> {
        let row = self.choices.get(s.0)?;
        row.binary_search_by_key(&a, |c| c.action)
            .ok()
            .map(|i| &row[i])
    }

    /// Number of (state, action, outcome, successor) edges.
    pub fn transition_count(&self) -> usize {
        self.choices
            .iter()
            .flat_map(|row| row.iter())
            .map(Choice::edge_count)
            .sum()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.choices.len()).map(StateId)
    }

    /// Checks that `path` follows enabled actions and positive-probability
    /// successor sets of this structure.
    pub fn check_path(&self, path: &FinitePath) -> Result<(), PathError> {
        let n = self.num_states();
        for (i, &s) in path.states().iter().enumerate() {
            if s.0 >= n {
                return Err(PathError::UnknownState { position: i });
            }
        }
        for (i, &a) in path.actions().iter().enumerate() {
            let s = path.states()[i];
            let next = path.states()[i + 1];
            let choice = self
                .choice(s, a)
                .ok_or(PathError::ActionNotEnabled { position: i })?;
            if !choice.can_reach(next) {
                return Err(PathError::NotASuccessor { position: i });
            }
        }
        Ok(())
    }
}

/// An alternating sequence `s₀ a₀ s₁ … sₙ` ending in a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePath {
    states: Vec<StateId>,
    actions: Vec<ActionId>,
}

impl FinitePath {
    pub fn new(start: StateId) -> FinitePath {
        FinitePath {
            states: alloc::vec![start],
            actions: Vec::new(),
        }
    }

    /// Builds a path from its parts; `states` must be one longer than `actions`.
    pub fn from_parts(states: Vec<StateId>, actions: Vec<ActionId>) -> Option<FinitePath> {
        (states.len() == actions.len() + 1).then_some(FinitePath { states, actions })
    }

    pub fn push(&mut self, action: ActionId, next: StateId) {
        self.actions.push(action);
        self.states.push(next);
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    /// Number of actions taken.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn last(&self) -> StateId {
        *self.states.last().expect("paths are never empty")
    }

    pub fn first(&self) -> StateId {
        self.states[0]
    }

    /// The prefix ending at state position `k`.
    pub fn prefix(&self, k: usize) -> FinitePath {
        FinitePath {
            states: self.states[..=k].to_vec(),
            actions: self.actions[..k].to_vec(),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("path position {position}: unknown state")]
    UnknownState { position: usize },
    #[error("path position {position}: action not enabled")]
    ActionNotEnabled { position: usize },
    #[error("path position {position}: next state is not a possible successor")]
    NotASuccessor { position: usize },
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid model: {}", summarize(.0))]
    Invalid(Vec<Violation>),
    #[error("action {action:?} is not enabled at state {state:?}")]
    ActionNotEnabled { state: StateId, action: ActionId },
    #[error("invalid path: {0}")]
    Path(#[from] PathError),
}

fn summarize(violations: &[Violation]) -> String {
    match violations {
        [] => "no violations".to_string(),
        [only] => only.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}

/// One broken model invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Name-based model description; mirrors the JSON model file.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ModelDescription {
    pub states: Vec<String>,
    pub initial: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub atoms: Vec<String>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub labels: BTreeMap<String, Vec<String>>,
    pub actions: Vec<String>,
    /// Enabled actions per state; when absent every action is enabled everywhere.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub enabled: Option<BTreeMap<String, Vec<String>>>,
    pub transitions: Vec<TransitionDescription>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub costs: BTreeMap<String, BTreeMap<String, u32>>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub reload: Vec<String>,
    pub cap: u32,
    /// Accepting product states; only present in exported products.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub accepting: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TransitionDescription {
    pub from: String,
    pub action: String,
    pub outcomes: Vec<OutcomeDescription>,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct OutcomeDescription {
    pub prob: f64,
    pub set: Vec<String>,
}

/// Formats a float with at most nine decimals and no trailing zeros.
fn short_float(x: f64) -> String {
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0');
    s.trim_end_matches('.').to_string()
}

/// Returns every invariant violation of `desc`; empty iff the description
/// denotes a valid CMDPST.
pub fn validate_model(desc: &ModelDescription) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |location: String, message: String| out.push(Violation { location, message });

    let states = index_names(&desc.states, "states", &mut push);
    let atoms = index_names(&desc.atoms, "atoms", &mut push);
    let actions = index_names(&desc.actions, "actions", &mut push);

    if desc.atoms.len() > MAX_ATOMS {
        push(
            "atoms".into(),
            format!("{} atoms exceed the supported maximum {MAX_ATOMS}", desc.atoms.len()),
        );
    }
    if !states.contains_key(desc.initial.as_str()) {
        push("initial".into(), format!("unknown state '{}'", desc.initial));
    }
    for (state, labels) in &desc.labels {
        if !states.contains_key(state.as_str()) {
            push(format!("labels.{state}"), "unknown state".into());
        }
        for atom in labels {
            if !atoms.contains_key(atom.as_str()) {
                push(format!("labels.{state}"), format!("unknown atom '{atom}'"));
            }
        }
    }
    for r in &desc.reload {
        if !states.contains_key(r.as_str()) {
            push("reload".into(), format!("unknown state '{r}'"));
        }
    }
    if let Some(acc) = &desc.accepting {
        for s in acc {
            if !states.contains_key(s.as_str()) {
                push("accepting".into(), format!("unknown state '{s}'"));
            }
        }
    }

    let enabled = enabled_pairs(desc);
    if let Some(map) = &desc.enabled {
        for (state, acts) in map {
            if !states.contains_key(state.as_str()) {
                push(format!("enabled.{state}"), "unknown state".into());
            }
            for a in acts {
                if !actions.contains_key(a.as_str()) {
                    push(format!("enabled.{state}"), format!("unknown action '{a}'"));
                }
            }
        }
    }

    let mut defined: BTreeSet<(&str, &str)> = BTreeSet::new();
    for (i, t) in desc.transitions.iter().enumerate() {
        let loc = format!("transitions[{i}] ({}, {})", t.from, t.action);
        if !states.contains_key(t.from.as_str()) {
            push(loc.clone(), format!("unknown state '{}'", t.from));
        }
        if !actions.contains_key(t.action.as_str()) {
            push(loc.clone(), format!("unknown action '{}'", t.action));
        }
        if !enabled.contains(&(t.from.as_str(), t.action.as_str())) {
            push(loc.clone(), "action not enabled at state".into());
        }
        if !defined.insert((t.from.as_str(), t.action.as_str())) {
            push(loc.clone(), "duplicate transition entry".into());
        }
        if t.outcomes.is_empty() {
            push(loc.clone(), "no outcomes".into());
            continue;
        }
        let mut sum = 0.0;
        let mut seen_sets: BTreeSet<Vec<&str>> = BTreeSet::new();
        for (j, o) in t.outcomes.iter().enumerate() {
            let oloc = format!("{loc} outcome {j}");
            if !(o.prob.is_finite() && o.prob > 0.0 && o.prob <= 1.0) {
                push(oloc.clone(), format!("probability {} outside (0, 1]", o.prob));
            }
            sum += o.prob;
            if o.set.is_empty() {
                push(oloc.clone(), "empty successor set".into());
            }
            for s in &o.set {
                if !states.contains_key(s.as_str()) {
                    push(oloc.clone(), format!("unknown successor '{s}'"));
                }
            }
            let mut key: Vec<&str> = o.set.iter().map(String::as_str).collect();
            key.sort_unstable();
            key.dedup();
            if !key.is_empty() && !seen_sets.insert(key) {
                push(oloc, "duplicate successor set".into());
            }
        }
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            push(loc, format!("probabilities sum to {}", short_float(sum)));
        }
    }

    for &(s, a) in &enabled {
        if !defined.contains(&(s, a)) {
            push(format!("({s}, {a})"), "enabled action has no transitions".into());
        }
        if desc.costs.get(s).and_then(|m| m.get(a)).is_none() {
            push(format!("costs.{s}.{a}"), "missing cost for enabled action".into());
        }
    }
    for (s, row) in &desc.costs {
        for a in row.keys() {
            if !enabled.contains(&(s.as_str(), a.as_str())) {
                push(format!("costs.{s}.{a}"), "cost given for a disabled action".into());
            }
        }
    }
    out
}

fn index_names<'a>(
    names: &'a [String],
    what: &str,
    push: &mut impl FnMut(String, String),
) -> BTreeMap<&'a str, usize> {
    let mut map = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.as_str(), i).is_some() {
            push(what.into(), format!("duplicate name '{n}'"));
        }
    }
    map
}

fn enabled_pairs(desc: &ModelDescription) -> BTreeSet<(&str, &str)> {
    match &desc.enabled {
        Some(map) => map
            .iter()
            .flat_map(|(s, acts)| acts.iter().map(move |a| (s.as_str(), a.as_str())))
            .collect(),
        None => desc
            .states
            .iter()
            .flat_map(|s| desc.actions.iter().map(move |a| (s.as_str(), a.as_str())))
            .collect(),
    }
}

/// A validated consumption MDPST.
#[derive(Clone, Debug, PartialEq)]
pub struct Cmdpst {
    state_names: Vec<String>,
    atom_names: Vec<String>,
    action_names: Vec<String>,
    labels: Vec<AtomSet>,
    reload: Vec<bool>,
    cap: u32,
    structure: Mdpst,
}

impl Cmdpst {
    /// Validates and indexes a description.
    pub fn from_description(desc: &ModelDescription) -> Result<Cmdpst, ModelError> {
        let violations = validate_model(desc);
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        let state_ix: BTreeMap<&str, StateId> = desc
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), StateId(i)))
            .collect();
        let action_ix: BTreeMap<&str, ActionId> = desc
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), ActionId(i)))
            .collect();

        let mut labels = alloc::vec![AtomSet::EMPTY; desc.states.len()];
        for (s, names) in &desc.labels {
            labels[state_ix[s.as_str()].0] =
                AtomSet::from_names(&desc.atoms, names).expect("validated atoms");
        }
        let mut reload = alloc::vec![false; desc.states.len()];
        for r in &desc.reload {
            reload[state_ix[r.as_str()].0] = true;
        }
        let mut choices: Vec<Vec<Choice>> = alloc::vec![Vec::new(); desc.states.len()];
        for t in &desc.transitions {
            let s = state_ix[t.from.as_str()];
            let action = action_ix[t.action.as_str()];
            let outcomes = t
                .outcomes
                .iter()
                .map(|o| Outcome {
                    prob: o.prob,
                    successors: o.set.iter().map(|n| state_ix[n.as_str()]).collect(),
                })
                .collect();
            choices[s.0].push(Choice {
                action,
                cost: desc.costs[&t.from][&t.action],
                outcomes,
            });
        }
        Ok(Cmdpst {
            state_names: desc.states.clone(),
            atom_names: desc.atoms.clone(),
            action_names: desc.actions.clone(),
            labels,
            reload,
            cap: desc.cap,
            structure: Mdpst::new(state_ix[desc.initial.as_str()], choices),
        })
    }

    /// Assembles a model from already-indexed parts. Used by the product and
    /// pruning constructions, whose outputs are valid by construction.
    pub(crate) fn from_parts(
        state_names: Vec<String>,
        atom_names: Vec<String>,
        action_names: Vec<String>,
        labels: Vec<AtomSet>,
        reload: Vec<bool>,
        cap: u32,
        structure: Mdpst,
    ) -> Cmdpst {
        debug_assert_eq!(state_names.len(), structure.num_states());
        Cmdpst {
            state_names,
            atom_names,
            action_names,
            labels,
            reload,
            cap,
            structure,
        }
    }

    pub fn to_description(&self) -> ModelDescription {
        let name = |s: StateId| self.state_names[s.0].clone();
        let mut labels = BTreeMap::new();
        let mut enabled = BTreeMap::new();
        let mut costs: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
        let mut transitions = Vec::new();
        for s in self.states() {
            if self.labels[s.0] != AtomSet::EMPTY {
                labels.insert(name(s), self.labels[s.0].names(&self.atom_names));
            }
            let mut acts = Vec::new();
            for c in self.choices(s) {
                let a = self.action_names[c.action.0].clone();
                acts.push(a.clone());
                costs.entry(name(s)).or_default().insert(a.clone(), c.cost);
                transitions.push(TransitionDescription {
                    from: name(s),
                    action: a,
                    outcomes: c
                        .outcomes
                        .iter()
                        .map(|o| OutcomeDescription {
                            prob: o.prob,
                            set: o.successors.iter().map(|&t| name(t)).collect(),
                        })
                        .collect(),
                });
            }
            if !acts.is_empty() {
                enabled.insert(name(s), acts);
            }
        }
        ModelDescription {
            states: self.state_names.clone(),
            initial: name(self.initial()),
            atoms: self.atom_names.clone(),
            labels,
            actions: self.action_names.clone(),
            enabled: Some(enabled),
            transitions,
            costs,
            reload: self
                .states()
                .filter(|&s| self.is_reload(s))
                .map(name)
                .collect(),
            cap: self.cap,
            accepting: None,
        }
    }

    #[inline]
    pub fn structure(&self) -> &Mdpst {
        &self.structure
    }

    #[inline]
    pub fn initial(&self) -> StateId {
        self.structure.initial()
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.structure.num_states()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        self.structure.states()
    }

    #[inline]
    pub fn choices(&self, s: StateId) -> &[Choice] {
        self.structure.choices(s)
    }

    pub fn choice(&self, s: StateId, a: ActionId) -> Result<&Choice, ModelError> {
        self.structure
            .choice(s, a)
            .ok_or(ModelError::ActionNotEnabled { state: s, action: a })
    }

    pub fn cost(&self, s: StateId, a: ActionId) -> Result<u32, ModelError> {
        self.choice(s, a).map(|c| c.cost)
    }

    #[inline]
    pub fn label(&self, s: StateId) -> AtomSet {
        self.labels[s.0]
    }

    #[inline]
    pub fn is_reload(&self, s: StateId) -> bool {
        self.reload[s.0]
    }

    #[inline]
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a.0]
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    pub fn atoms(&self) -> &[String] {
        &self.atom_names
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name).map(StateId)
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.action_names.iter().position(|n| n == name).map(ActionId)
    }

    pub fn transition_count(&self) -> usize {
        self.structure.transition_count()
    }
}

/// Maximum reload-delimited segment cost of `path`.
///
/// Segments start at position 0 and at every later position whose state is a
/// reload state; the action entering a reload state is charged to the segment
/// it leaves.
pub fn path_cost(model: &Cmdpst, path: &FinitePath) -> Result<u64, ModelError> {
    model.structure().check_path(path)?;
    let mut segment = 0u64;
    let mut worst = 0u64;
    for (i, &a) in path.actions().iter().enumerate() {
        segment += u64::from(model.cost(path.states()[i], a)?);
        worst = worst.max(segment);
        if model.is_reload(path.states()[i + 1]) {
            segment = 0;
        }
    }
    Ok(worst)
}

/// True iff every prefix of `path` stays within the capacity.
pub fn is_feasible_path(model: &Cmdpst, path: &FinitePath) -> Result<bool, ModelError> {
    // Costs are nonnegative, so the prefix maxima are bounded by the full path's.
    Ok(path_cost(model, path)? <= u64::from(model.cap()))
}

/// Worst-case expectation of `values` over the feasible distributions of `(s, a)`.
pub fn robust_expectation(
    model: &Cmdpst,
    s: StateId,
    a: ActionId,
    values: &[f64],
) -> Result<f64, ModelError> {
    Ok(model.choice(s, a)?.robust_expectation(values))
}

/// Union of the successor sets of `(s, a)`.
pub fn enumerate_successors(
    model: &Cmdpst,
    s: StateId,
    a: ActionId,
) -> Result<BTreeSet<StateId>, ModelError> {
    Ok(model.choice(s, a)?.successor_union())
}
