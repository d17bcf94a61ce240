//! LTLf over finite traces: syntax, semantics, progression and DFA compilation.
//!
//! The empty trace satisfies `true` and negations of atoms, `X` and `U`
//! formulas, but no atom, `X` or `U` formula itself.

mod canon;
mod dfa;
mod parse;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use canon::{canonicalize, progress};
pub use dfa::{compile_dfa, compile_dfa_with_limit, Dfa, DfaError, DfaState, DEFAULT_STATE_LIMIT};
pub use parse::{parse_ltlf, ParseError};

use crate::model::AtomSet;

/// LTLf abstract syntax. `F` and `G` are sugar and expand on construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    /// `F f`, i.e. `true U f`.
    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::True, f)
    }

    /// `G f`, i.e. `!(true U !f)`.
    pub fn always(f: Formula) -> Formula {
        Formula::not(Formula::eventually(Formula::not(f)))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) | Formula::Next(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

/// Prints in the surface syntax accepted by [`parse_ltlf`]; binary
/// operators are always parenthesized.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => f.write_str(a),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::Next(x) => write!(f, "X {x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}

/// A trace position: answers which atoms hold.
pub trait Letter {
    fn holds(&self, atom: &str) -> bool;
}

impl<T: Letter + ?Sized> Letter for &T {
    fn holds(&self, atom: &str) -> bool {
        (**self).holds(atom)
    }
}

impl Letter for BTreeSet<String> {
    fn holds(&self, atom: &str) -> bool {
        self.contains(atom)
    }
}

impl Letter for BTreeSet<&str> {
    fn holds(&self, atom: &str) -> bool {
        self.contains(atom)
    }
}

impl<S: AsRef<str>> Letter for [S] {
    fn holds(&self, atom: &str) -> bool {
        self.iter().any(|a| a.as_ref() == atom)
    }
}

impl<S: AsRef<str>> Letter for Vec<S> {
    fn holds(&self, atom: &str) -> bool {
        self.as_slice().holds(atom)
    }
}

/// An [`AtomSet`] interpreted against an ordered atom list.
#[derive(Clone, Copy, Debug)]
pub struct Symbol<'a> {
    pub atoms: &'a [String],
    pub set: AtomSet,
}

impl Letter for Symbol<'_> {
    fn holds(&self, atom: &str) -> bool {
        self.atoms
            .iter()
            .position(|a| a == atom)
            .is_some_and(|i| self.set.contains(i))
    }
}

/// Decides `trace ⊨ formula` directly from the recursive semantics.
pub fn eval_trace<L: Letter>(formula: &Formula, trace: &[L]) -> bool {
    eval_at(formula, trace, 0)
}

/// [`eval_trace`] for bitmask traces over `atoms`.
pub fn eval_trace_bits(formula: &Formula, atoms: &[String], trace: &[AtomSet]) -> bool {
    let letters: Vec<Symbol<'_>> = trace.iter().map(|&set| Symbol { atoms, set }).collect();
    eval_trace(formula, &letters)
}

fn eval_at<L: Letter>(f: &Formula, t: &[L], i: usize) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => i < t.len() && t[i].holds(a),
        Formula::Not(x) => !eval_at(x, t, i),
        Formula::And(a, b) => eval_at(a, t, i) && eval_at(b, t, i),
        Formula::Or(a, b) => eval_at(a, t, i) || eval_at(b, t, i),
        Formula::Next(x) => i + 1 < t.len() && eval_at(x, t, i + 1),
        Formula::Until(a, b) => {
            for k in i..t.len() {
                if eval_at(b, t, k) {
                    return true;
                }
                if !eval_at(a, t, k) {
                    return false;
                }
            }
            false
        }
    }
}
