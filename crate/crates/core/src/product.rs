//! Synchronous product of a CMDPST with a task DFA.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::ltlf::{Dfa, DfaError, DfaState};
use crate::model::{AtomSet, Choice, Cmdpst, Mdpst, Outcome, StateId};

/// When a product state counts as accepting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AcceptanceMode {
    /// `(s, q)` accepts iff `q` accepts: the label of `s` is not yet read.
    #[default]
    Lag,
    /// `(s, q)` accepts iff `δ(q, L(s))` accepts.
    Lookahead,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("alphabet mismatch: {0}")]
    Alphabet(#[from] DfaError),
}

/// Product model with its accepting set and the `(model state, DFA state)`
/// pair behind every product state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductCmdpst {
    model: Cmdpst,
    accepting: Vec<bool>,
    origin: Vec<(StateId, DfaState)>,
    mode: AcceptanceMode,
}

impl ProductCmdpst {
    pub(crate) fn from_parts(
        model: Cmdpst,
        accepting: Vec<bool>,
        origin: Vec<(StateId, DfaState)>,
        mode: AcceptanceMode,
    ) -> ProductCmdpst {
        ProductCmdpst {
            model,
            accepting,
            origin,
            mode,
        }
    }

    pub fn model(&self) -> &Cmdpst {
        &self.model
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s.0]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn origin(&self, s: StateId) -> (StateId, DfaState) {
        self.origin[s.0]
    }

    pub fn mode(&self) -> AcceptanceMode {
        self.mode
    }

    pub fn num_states(&self) -> usize {
        self.model.num_states()
    }
}

/// Per-state DFA symbols of `model`'s labels.
pub(crate) fn translated_labels(model: &Cmdpst, dfa: &Dfa) -> Result<Vec<AtomSet>, DfaError> {
    if let Some(a) = model.atoms().iter().find(|a| !dfa.atoms().contains(a)) {
        return Err(DfaError::UnknownAtom(a.clone()));
    }
    model
        .states()
        .map(|s| dfa.translate(model.atoms(), model.label(s)))
        .collect()
}

/// Builds the product reachable from `(s̄, q̄)` in BFS order. From `(s, q)`
/// every successor set `Θ` becomes `Θ × {δ(q, L(s))}`.
pub fn build_product(
    model: &Cmdpst,
    dfa: &Dfa,
    mode: AcceptanceMode,
) -> Result<ProductCmdpst, ProductError> {
    let symbols = translated_labels(model, dfa)?;
    let q_count = dfa.num_states();
    let mut index: Vec<Option<StateId>> = vec![None; model.num_states() * q_count];
    let mut origin: Vec<(StateId, DfaState)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: StateId, q: DfaState, origin: &mut Vec<_>, queue: &mut VecDeque<_>| {
        let slot = &mut index[s.0 * q_count + q.0];
        *slot.get_or_insert_with(|| {
            let id = StateId(origin.len());
            origin.push((s, q));
            queue.push_back(id);
            id
        })
    };
    intern(model.initial(), dfa.initial(), &mut origin, &mut queue);

    let mut choices: Vec<Vec<Choice>> = Vec::new();
    while let Some(p) = queue.pop_front() {
        let (s, q) = origin[p.0];
        let q_next = dfa.step(q, symbols[s.0])?;
        let mut row = Vec::with_capacity(model.choices(s).len());
        for c in model.choices(s) {
            let outcomes = c
                .outcomes
                .iter()
                .map(|o| Outcome {
                    prob: o.prob,
                    successors: o
                        .successors
                        .iter()
                        .map(|&t| intern(t, q_next, &mut origin, &mut queue))
                        .collect(),
                })
                .collect();
            row.push(Choice {
                action: c.action,
                cost: c.cost,
                outcomes,
            });
        }
        debug_assert_eq!(choices.len(), p.0);
        choices.push(row);
    }

    let names: Vec<String> = origin
        .iter()
        .map(|&(s, q)| format!("({},q{})", model.state_name(s), q.0))
        .collect();
    let accepting = origin
        .iter()
        .map(|&(s, q)| match mode {
            AcceptanceMode::Lag => Ok(dfa.is_accepting(q)),
            AcceptanceMode::Lookahead => Ok(dfa.is_accepting(dfa.step(q, symbols[s.0])?)),
        })
        .collect::<Result<Vec<bool>, DfaError>>()?;
    let structure = Mdpst::new(StateId(0), choices);
    let product = Cmdpst::from_parts(
        names,
        model.atoms().to_vec(),
        model.action_names().to_vec(),
        origin.iter().map(|&(s, _)| model.label(s)).collect(),
        origin.iter().map(|&(s, _)| model.is_reload(s)).collect(),
        model.cap(),
        structure,
    );
    Ok(ProductCmdpst {
        model: product,
        accepting,
        origin,
        mode,
    })
}

/// Accepting states that are graph-reachable from the initial state.
pub fn accepting_reachable(product: &ProductCmdpst) -> BTreeSet<StateId> {
    let m = product.model();
    let mut seen = vec![false; m.num_states()];
    let mut stack = vec![m.initial()];
    seen[m.initial().0] = true;
    while let Some(s) = stack.pop() {
        for c in m.choices(s) {
            for t in c.successor_union() {
                if !seen[t.0] {
                    seen[t.0] = true;
                    stack.push(t);
                }
            }
        }
    }
    m.states()
        .filter(|&s| seen[s.0] && product.is_accepting(s))
        .collect()
}
