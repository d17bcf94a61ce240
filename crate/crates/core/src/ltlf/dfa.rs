use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::canon::{accepts_empty, dnf_formula, initial_state, Dnf, Progressor};
use super::{Formula, Symbol};
use crate::model::{AtomSet, MAX_ATOMS};

/// Default bound on compiled DFA size.
pub const DEFAULT_STATE_LIMIT: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DfaState(pub usize);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DfaError {
    #[error("atom '{0}' is not in the alphabet")]
    UnknownAtom(String),
    #[error("{0} atoms exceed the supported maximum {MAX_ATOMS}")]
    TooManyAtoms(usize),
    #[error("DFA exceeds the state limit of {0}")]
    Capacity(usize),
    #[error("symbol {symbol:#b} uses atoms outside the {atoms}-atom alphabet")]
    Alphabet { symbol: u32, atoms: usize },
    #[error("malformed DFA: {0}")]
    Malformed(String),
}

/// A complete DFA over the powerset alphabet of `atoms`; symbol `k` is the
/// atom set whose bitmask is `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    atoms: Vec<String>,
    initial: DfaState,
    accepting: Vec<bool>,
    delta: Vec<usize>,
    descriptions: Vec<String>,
}

impl Dfa {
    /// Assembles a DFA from an explicit table `transitions[q][symbol]`.
    pub fn from_parts(
        atoms: Vec<String>,
        initial: DfaState,
        accepting: Vec<bool>,
        transitions: Vec<Vec<DfaState>>,
    ) -> Result<Dfa, DfaError> {
        if atoms.len() > MAX_ATOMS {
            return Err(DfaError::TooManyAtoms(atoms.len()));
        }
        let n = accepting.len();
        let symbols = 1usize << atoms.len();
        if n == 0 {
            return Err(DfaError::Malformed("no states".into()));
        }
        if initial.0 >= n {
            return Err(DfaError::Malformed(format!("initial state {} out of range", initial.0)));
        }
        if transitions.len() != n {
            return Err(DfaError::Malformed(format!(
                "{} transition rows for {n} states",
                transitions.len()
            )));
        }
        let mut delta = Vec::with_capacity(n * symbols);
        for (q, row) in transitions.iter().enumerate() {
            if row.len() != symbols {
                return Err(DfaError::Malformed(format!(
                    "state {q} has {} successors, expected {symbols}",
                    row.len()
                )));
            }
            for t in row {
                if t.0 >= n {
                    return Err(DfaError::Malformed(format!("state {q} targets unknown state {}", t.0)));
                }
                delta.push(t.0);
            }
        }
        Ok(Dfa {
            descriptions: (0..n).map(|q| format!("q{q}")).collect(),
            atoms,
            initial,
            accepting,
            delta,
        })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_symbols(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn states(&self) -> impl Iterator<Item = DfaState> {
        (0..self.num_states()).map(DfaState)
    }

    pub fn initial(&self) -> DfaState {
        self.initial
    }

    pub fn is_accepting(&self, q: DfaState) -> bool {
        self.accepting[q.0]
    }

    /// Residual formula of a compiled state, or `q<i>` for hand-built DFAs.
    pub fn describe(&self, q: DfaState) -> &str {
        &self.descriptions[q.0]
    }

    fn check_symbol(&self, symbol: AtomSet) -> Result<(), DfaError> {
        if (symbol.0 as usize) < self.num_symbols() {
            Ok(())
        } else {
            Err(DfaError::Alphabet {
                symbol: symbol.0,
                atoms: self.atoms.len(),
            })
        }
    }

    pub fn step(&self, q: DfaState, symbol: AtomSet) -> Result<DfaState, DfaError> {
        self.check_symbol(symbol)?;
        Ok(DfaState(self.delta[q.0 * self.num_symbols() + symbol.0 as usize]))
    }

    /// Runs `word` from the initial state and reports acceptance of the
    /// final state.
    pub fn run(&self, word: &[AtomSet]) -> Result<bool, DfaError> {
        let mut q = self.initial;
        for &sym in word {
            q = self.step(q, sym)?;
        }
        Ok(self.is_accepting(q))
    }

    /// Re-expresses `set` (over `atoms`) in this DFA's alphabet.
    pub fn translate(&self, atoms: &[String], set: AtomSet) -> Result<AtomSet, DfaError> {
        let mut out = AtomSet::EMPTY;
        for i in set.iter() {
            let name = atoms
                .get(i)
                .ok_or(DfaError::Alphabet { symbol: set.0, atoms: atoms.len() })?;
            let j = self
                .atoms
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| DfaError::UnknownAtom(name.clone()))?;
            out = out.with(j);
        }
        Ok(out)
    }

    /// Table view `transitions[q][symbol]`.
    pub fn transitions(&self) -> Vec<Vec<DfaState>> {
        self.delta
            .chunks(self.num_symbols())
            .map(|row| row.iter().map(|&t| DfaState(t)).collect())
            .collect()
    }
}

/// Compiles with the default state limit.
pub fn compile_dfa(formula: &Formula, atoms: &[String]) -> Result<Dfa, DfaError> {
    compile_dfa_with_limit(formula, atoms, DEFAULT_STATE_LIMIT)
}

/// Builds the DFA of residual obligations reachable from `formula` by
/// progression. A state accepts iff its obligation holds on the empty
/// continuation.
pub fn compile_dfa_with_limit(
    formula: &Formula,
    atoms: &[String],
    limit: usize,
) -> Result<Dfa, DfaError> {
    if atoms.len() > MAX_ATOMS {
        return Err(DfaError::TooManyAtoms(atoms.len()));
    }
    if let Some(a) = formula.atoms().into_iter().find(|a| !atoms.contains(a)) {
        return Err(DfaError::UnknownAtom(a));
    }
    let symbols = 1usize << atoms.len();
    let mut index: BTreeMap<Dnf, usize> = BTreeMap::new();
    let mut states: Vec<Dnf> = Vec::new();
    let mut queue = VecDeque::new();
    let start = initial_state(formula);
    index.insert(start.clone(), 0);
    states.push(start);
    queue.push_back(0usize);
    let mut delta: Vec<usize> = Vec::new();
    while let Some(q) = queue.pop_front() {
        debug_assert_eq!(delta.len(), q * symbols);
        let current = states[q].clone();
        for sym in 0..symbols {
            let letter = Symbol {
                atoms,
                set: AtomSet(sym as u32),
            };
            let next = Progressor::new(&letter).state(&current);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= limit {
                        return Err(DfaError::Capacity(limit));
                    }
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id);
                    id
                }
            };
            delta.push(id);
        }
    }
    Ok(Dfa {
        atoms: atoms.to_vec(),
        initial: DfaState(0),
        accepting: states.iter().map(accepts_empty).collect(),
        descriptions: states.iter().map(|d| format!("{}", dnf_formula(d))).collect(),
        delta,
    })
}
