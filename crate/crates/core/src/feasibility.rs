//! Feasible region of a CMDPST and the pruned model it induces.
//!
//! `FeasibleRegion` is a label-correcting search over states keyed by the
//! cheapest cost accumulated since the last reload. A state is in the
//! region iff some feasible path ends there; an action is kept iff it is
//! affordable from that cheapest entry.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use thiserror::Error;

use crate::model::{ActionId, Choice, Cmdpst, Mdpst, Outcome, StateId};
use crate::product::ProductCmdpst;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleRegion {
    in_region: Vec<bool>,
    actions: Vec<Vec<ActionId>>,
    min_cost: Vec<Option<u32>>,
    relaxations: usize,
}

impl FeasibleRegion {
    pub fn contains(&self, s: StateId) -> bool {
        self.in_region[s.0]
    }

    /// Feasibility-preserving actions at `s`, sorted.
    pub fn actions(&self, s: StateId) -> &[ActionId] {
        &self.actions[s.0]
    }

    /// Cheapest segment cost with which `s` can be entered; `None` outside the region.
    pub fn min_cost(&self, s: StateId) -> Option<u32> {
        self.min_cost[s.0]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.in_region.len())
            .filter(|&i| self.in_region[i])
            .map(StateId)
    }

    pub fn len(&self) -> usize {
        self.in_region.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of successful cost improvements performed.
    pub fn relaxations(&self) -> usize {
        self.relaxations
    }
}

pub fn feasible_region(model: &Cmdpst) -> FeasibleRegion {
    let n = model.num_states();
    let cap = model.cap();
    let mut best: Vec<Option<u32>> = vec![None; n];
    let mut in_region = vec![false; n];
    let mut actions: Vec<BTreeSet<ActionId>> = vec![BTreeSet::new(); n];
    let mut heap = BinaryHeap::new();
    let mut relaxations = 0;

    let start = model.initial();
    best[start.0] = Some(0);
    heap.push(Reverse((0u32, start)));
    while let Some(Reverse((c, s))) = heap.pop() {
        if best[s.0] != Some(c) {
            continue;
        }
        in_region[s.0] = true;
        for choice in model.choices(s) {
            let spent = u64::from(c) + u64::from(choice.cost);
            if spent > u64::from(cap) {
                continue;
            }
            actions[s.0].insert(choice.action);
            for t in choice.successor_union() {
                let entry = if model.is_reload(t) { 0 } else { spent as u32 };
                if best[t.0].is_none_or(|old| entry < old) {
                    best[t.0] = Some(entry);
                    relaxations += 1;
                    heap.push(Reverse((entry, t)));
                }
            }
        }
    }
    FeasibleRegion {
        in_region,
        actions: actions.into_iter().map(|a| a.into_iter().collect()).collect(),
        min_cost: best,
        relaxations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TargetMode {
    /// Some target is feasible.
    #[default]
    Any,
    /// Every target is feasible.
    All,
}

/// Outcome of a target feasibility check.
///
/// Feasibility only says that some path reaches a target within budget;
/// nature may still prevent reaching it with positive probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetReport {
    pub satisfied: bool,
    pub feasible: Vec<StateId>,
    pub blocked: Vec<StateId>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("unknown target state {0:?}")]
    UnknownTarget(StateId),
}

pub fn check_target_feasible(
    model: &Cmdpst,
    targets: &[StateId],
    mode: TargetMode,
) -> Result<TargetReport, FeasibilityError> {
    if let Some(&t) = targets.iter().find(|t| t.0 >= model.num_states()) {
        return Err(FeasibilityError::UnknownTarget(t));
    }
    let region = feasible_region(model);
    let targets: BTreeSet<StateId> = targets.iter().copied().collect();
    let (feasible, blocked): (Vec<StateId>, Vec<StateId>) =
        targets.into_iter().partition(|&t| region.contains(t));
    let satisfied = match mode {
        TargetMode::Any => !feasible.is_empty(),
        TargetMode::All => blocked.is_empty(),
    };
    Ok(TargetReport {
        satisfied,
        feasible,
        blocked,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PruneReport {
    pub states_before: usize,
    pub states_after: usize,
    pub removed_states: usize,
    pub removed_actions: usize,
    pub removed_transitions: usize,
}

/// A pruned model with the mapping back to the original ordinals.
#[derive(Clone, Debug, PartialEq)]
pub struct Pruned {
    pub model: Cmdpst,
    /// New ordinal → original ordinal.
    pub kept: Vec<StateId>,
    /// Original ordinal → new ordinal.
    pub state_map: Vec<Option<StateId>>,
    pub report: PruneReport,
}

/// Restricts `model` to its feasible region and feasibility-preserving
/// actions. The action name list is kept whole so ordinals stay stable.
pub fn prune(model: &Cmdpst) -> Pruned {
    let region = feasible_region(model);
    let kept: Vec<StateId> = region.states().collect();
    let mut state_map = vec![None; model.num_states()];
    for (i, &s) in kept.iter().enumerate() {
        state_map[s.0] = Some(StateId(i));
    }
    let mut report = PruneReport {
        states_before: model.num_states(),
        states_after: kept.len(),
        removed_states: model.num_states() - kept.len(),
        ..Default::default()
    };
    for s in model.states() {
        for c in model.choices(s) {
            if !(region.contains(s) && region.actions(s).contains(&c.action)) {
                report.removed_actions += 1;
                report.removed_transitions += c.edge_count();
            }
        }
    }
    let choices: Vec<Vec<Choice>> = kept
        .iter()
        .map(|&s| {
            model
                .choices(s)
                .iter()
                .filter(|c| region.actions(s).contains(&c.action))
                .map(|c| Choice {
                    action: c.action,
                    cost: c.cost,
                    outcomes: c
                        .outcomes
                        .iter()
                        .map(|o| Outcome {
                            prob: o.prob,
                            successors: o
                                .successors
                                .iter()
                                .map(|t| state_map[t.0].expect("region is closed"))
                                .collect(),
                        })
                        .collect(),
                })
                .collect()
        })
        .collect();
    let pruned = Cmdpst::from_parts(
        kept.iter().map(|&s| model.state_name(s).into()).collect(),
        model.atoms().to_vec(),
        model.action_names().to_vec(),
        kept.iter().map(|&s| model.label(s)).collect(),
        kept.iter().map(|&s| model.is_reload(s)).collect(),
        model.cap(),
        Mdpst::new(state_map[model.initial().0].expect("initial is feasible"), choices),
    );
    Pruned {
        model: pruned,
        kept,
        state_map,
        report,
    }
}

/// [`prune`] lifted to products, carrying acceptance and origins along.
pub fn prune_product(product: &ProductCmdpst) -> (ProductCmdpst, PruneReport) {
    let pruned = prune(product.model());
    let accepting = pruned.kept.iter().map(|&s| product.is_accepting(s)).collect();
    let origin = pruned.kept.iter().map(|&s| product.origin(s)).collect();
    (
        ProductCmdpst::from_parts(pruned.model, accepting, origin, product.mode()),
        pruned.report,
    )
}
