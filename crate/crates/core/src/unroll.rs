//! Resource-level unrolling of a product model.
//!
//! States are pairs `(s, c)` with `c ∈ [0, cap]` the remaining resource.
//! An action is enabled at `(s, c)` iff its cost is at most `c`; entering a
//! reload state restores `cap`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{Choice, FinitePath, Mdpst, Outcome, PathError, StateId};
use crate::product::ProductCmdpst;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnrollError {
    #[error("invalid path: {0}")]
    Path(#[from] PathError),
    #[error("state {0:?} at level {1} is not part of the unrolled model")]
    NotMaterialized(StateId, u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnrolledMdpst {
    structure: Mdpst,
    origin: Vec<(StateId, u32)>,
    targets: Vec<bool>,
    cap: u32,
    /// Dense `(product state, level)` lookup; `None` when not materialized.
    index: Vec<Option<StateId>>,
}

impl UnrolledMdpst {
    pub fn structure(&self) -> &Mdpst {
        &self.structure
    }

    pub fn num_states(&self) -> usize {
        self.structure.num_states()
    }

    pub fn transition_count(&self) -> usize {
        self.structure.transition_count()
    }

    pub fn initial(&self) -> StateId {
        self.structure.initial()
    }

    /// Product state and resource level of an unrolled state.
    pub fn origin(&self, u: StateId) -> (StateId, u32) {
        self.origin[u.0]
    }

    pub fn is_target(&self, u: StateId) -> bool {
        self.targets[u.0]
    }

    pub fn targets(&self) -> &[bool] {
        &self.targets
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn lookup(&self, product_state: StateId, level: u32) -> Option<StateId> {
        if level > self.cap {
            return None;
        }
        let slot = product_state.0 * (self.cap as usize + 1) + level as usize;
        self.index.get(slot).copied().flatten()
    }
}

fn successor(product: &ProductCmdpst, t: StateId, level: u32, cost: u32) -> (StateId, u32) {
    if product.model().is_reload(t) {
        (t, product.model().cap())
    } else {
        (t, level - cost)
    }
}

fn unrolled_choices(
    product: &ProductCmdpst,
    s: StateId,
    c: u32,
    mut id_of: impl FnMut(StateId, u32) -> StateId,
) -> Vec<Choice> {
    product
        .model()
        .choices(s)
        .iter()
        .filter(|ch| ch.cost <= c)
        .map(|ch| Choice {
            action: ch.action,
            cost: ch.cost,
            outcomes: ch
                .outcomes
                .iter()
                .map(|o| Outcome {
                    prob: o.prob,
                    successors: o
                        .successors
                        .iter()
                        .map(|&t| {
                            let (t, l) = successor(product, t, c, ch.cost);
                            id_of(t, l)
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect()
}

/// The smallest set of `(s, c)` pairs containing `(s̄, cap)` and closed
/// under enabled transitions, numbered in BFS order.
pub fn build_unrolled(product: &ProductCmdpst) -> UnrolledMdpst {
    let m = product.model();
    let cap = m.cap();
    let width = cap as usize + 1;
    let mut index: Vec<Option<StateId>> = vec![None; m.num_states() * width];
    let mut origin: Vec<(StateId, u32)> = Vec::new();
    let mut queue: VecDeque<StateId> = VecDeque::new();
    let mut intern = |s: StateId, c: u32, origin: &mut Vec<(StateId, u32)>, queue: &mut VecDeque<StateId>| {
        *index[s.0 * width + c as usize].get_or_insert_with(|| {
            let id = StateId(origin.len());
            origin.push((s, c));
            queue.push_back(id);
            id
        })
    };
    intern(m.initial(), cap, &mut origin, &mut queue);
    let mut choices = Vec::new();
    while let Some(u) = queue.pop_front() {
        let (s, c) = origin[u.0];
        let row = unrolled_choices(product, s, c, |t, l| intern(t, l, &mut origin, &mut queue));
        choices.push(row);
    }
    finish(product, Mdpst::new(StateId(0), choices), origin, index)
}

/// Materializes every `(s, c)` pair, reachable or not. State `(s, c)` gets
/// ordinal `s·(cap+1) + (cap − c)`, so the initial state `(s̄, cap)` of a
/// product numbered from its initial state is ordinal 0.
pub fn build_unrolled_grid(product: &ProductCmdpst) -> UnrolledMdpst {
    let m = product.model();
    let cap = m.cap();
    let width = cap as usize + 1;
    let id_of = |s: StateId, c: u32| StateId(s.0 * width + (cap - c) as usize);
    let mut origin = Vec::with_capacity(m.num_states() * width);
    let mut choices = Vec::with_capacity(m.num_states() * width);
    for s in m.states() {
        for c in (0..=cap).rev() {
            origin.push((s, c));
            choices.push(unrolled_choices(product, s, c, id_of));
        }
    }
    let mut index = vec![None; m.num_states() * width];
    for (i, &(s, c)) in origin.iter().enumerate() {
        index[s.0 * width + c as usize] = Some(StateId(i));
    }
    finish(product, Mdpst::new(id_of(m.initial(), cap), choices), origin, index)
}

fn finish(
    product: &ProductCmdpst,
    structure: Mdpst,
    origin: Vec<(StateId, u32)>,
    index: Vec<Option<StateId>>,
) -> UnrolledMdpst {
    UnrolledMdpst {
        targets: origin.iter().map(|&(s, _)| product.is_accepting(s)).collect(),
        cap: product.model().cap(),
        structure,
        origin,
        index,
    }
}

/// Drops the level component of an unrolled path.
pub fn project_path(unrolled: &UnrolledMdpst, path: &FinitePath) -> Result<FinitePath, UnrollError> {
    unrolled.structure().check_path(path)?;
    let states = path.states().iter().map(|&u| unrolled.origin(u).0).collect();
    Ok(FinitePath::from_parts(states, path.actions().to_vec()).expect("same shape"))
}

/// Result of annotating a product path with resource levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lifted {
    Path(FinitePath),
    /// The action at this position costs more than the remaining level.
    Infeasible { index: usize },
}

/// Annotates a product path with levels starting from `cap`.
pub fn lift_path(
    product: &ProductCmdpst,
    unrolled: &UnrolledMdpst,
    path: &FinitePath,
) -> Result<Lifted, UnrollError> {
    let m = product.model();
    m.structure().check_path(path)?;
    let mut level = m.cap();
    let mut levels = Vec::with_capacity(path.states().len());
    levels.push(level);
    for (i, &a) in path.actions().iter().enumerate() {
        let cost = m.choice(path.states()[i], a).expect("checked").cost;
        if cost > level {
            return Ok(Lifted::Infeasible { index: i });
        }
        level = successor(product, path.states()[i + 1], level, cost).1;
        levels.push(level);
    }
    let states = path
        .states()
        .iter()
        .zip(&levels)
        .map(|(&s, &c)| unrolled.lookup(s, c).ok_or(UnrollError::NotMaterialized(s, c)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Lifted::Path(
        FinitePath::from_parts(states, path.actions().to_vec()).expect("same shape"),
    ))
}
