//! Negation normal form, disjunctive canonical states and progression.
//!
//! Beyond the surface operators the normal form needs four ε-aware
//! elements: `Nonempty` (the trace has a position), `Empty`, weak next
//! (true on traces with no successor position) and release.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Formula, Letter};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Node {
    False,
    True,
    Lit(String, bool),
    Nonempty,
    Empty,
    Next(P),
    WeakNext(P),
    Until(P, P),
    Release(P, P),
    And(Vec<P>),
    Or(Vec<P>),
}

type P = Rc<Node>;
type Clause = BTreeSet<P>;

/// A canonical DFA state: a set of conjunctive clauses.
pub(crate) type Dnf = BTreeSet<Clause>;

fn rc(n: Node) -> P {
    Rc::new(n)
}

fn holds_on_empty(n: &Node) -> bool {
    match n {
        Node::True | Node::Empty | Node::WeakNext(_) | Node::Release(..) => true,
        Node::Lit(_, pos) => !pos,
        Node::False | Node::Nonempty | Node::Next(_) | Node::Until(..) => false,
        Node::And(xs) => xs.iter().all(|x| holds_on_empty(x)),
        Node::Or(xs) => xs.iter().any(|x| holds_on_empty(x)),
    }
}

fn contradictory(items: &BTreeSet<P>) -> bool {
    items.iter().any(|x| match &**x {
        Node::Lit(a, true) => items.contains(&rc(Node::Lit(a.clone(), false))),
        Node::Nonempty => items.contains(&rc(Node::Empty)),
        _ => false,
    })
}

fn mk_and(items: Vec<P>) -> P {
    let mut flat = BTreeSet::new();
    for x in items {
        match &*x {
            Node::True => {}
            Node::False => return rc(Node::False),
            Node::And(xs) => flat.extend(xs.iter().cloned()),
            _ => {
                flat.insert(x);
            }
        }
    }
    if contradictory(&flat) {
        return rc(Node::False);
    }
    match flat.len() {
        0 => rc(Node::True),
        1 => flat.into_iter().next().unwrap(),
        _ => rc(Node::And(flat.into_iter().collect())),
    }
}

fn mk_or(items: Vec<P>) -> P {
    let mut flat = BTreeSet::new();
    for x in items {
        match &*x {
            Node::False => {}
            Node::True => return rc(Node::True),
            Node::Or(xs) => flat.extend(xs.iter().cloned()),
            _ => {
                flat.insert(x);
            }
        }
    }
    match flat.len() {
        0 => rc(Node::False),
        1 => flat.into_iter().next().unwrap(),
        _ => rc(Node::Or(flat.into_iter().collect())),
    }
}

fn mk_next(x: P) -> P {
    match *x {
        Node::False => x,
        _ => rc(Node::Next(x)),
    }
}

fn mk_weak_next(x: P) -> P {
    match *x {
        Node::True => x,
        _ => rc(Node::WeakNext(x)),
    }
}

fn mk_until(a: P, b: P) -> P {
    match *b {
        Node::False => b,
        Node::True => rc(Node::Nonempty),
        _ => rc(Node::Until(a, b)),
    }
}

fn mk_release(a: P, b: P) -> P {
    match *b {
        Node::True => b,
        Node::False => rc(Node::Empty),
        _ => rc(Node::Release(a, b)),
    }
}

pub(crate) fn nnf(f: &Formula, neg: bool) -> P {
    match f {
        Formula::True => rc(if neg { Node::False } else { Node::True }),
        Formula::False => rc(if neg { Node::True } else { Node::False }),
        Formula::Atom(a) => rc(Node::Lit(a.clone(), !neg)),
        Formula::Not(x) => nnf(x, !neg),
        Formula::And(a, b) if neg => mk_or(alloc::vec![nnf(a, true), nnf(b, true)]),
        Formula::And(a, b) => mk_and(alloc::vec![nnf(a, false), nnf(b, false)]),
        Formula::Or(a, b) if neg => mk_and(alloc::vec![nnf(a, true), nnf(b, true)]),
        Formula::Or(a, b) => mk_or(alloc::vec![nnf(a, false), nnf(b, false)]),
        Formula::Next(x) if neg => mk_weak_next(nnf(x, true)),
        Formula::Next(x) => mk_next(nnf(x, false)),
        Formula::Until(a, b) if neg => mk_release(nnf(a, true), nnf(b, true)),
        Formula::Until(a, b) => mk_until(nnf(a, false), nnf(b, false)),
    }
}

fn dnf_true() -> Dnf {
    core::iter::once(Clause::new()).collect()
}

fn dnf_element(e: P) -> Dnf {
    core::iter::once(core::iter::once(e).collect()).collect()
}

fn simplify_clause(mut c: Clause) -> Option<Clause> {
    if contradictory(&c) {
        return None;
    }
    let empty = rc(Node::Empty);
    if c.contains(&empty) {
        if c.iter().any(|x| !holds_on_empty(x)) {
            return None;
        }
        return Some(core::iter::once(empty).collect());
    }
    let nonempty = rc(Node::Nonempty);
    if c.contains(&nonempty)
        && c.iter().any(|x| **x != Node::Nonempty && !holds_on_empty(x))
    {
        c.remove(&nonempty);
    }
    Some(c)
}

fn simplify(d: Dnf) -> Dnf {
    let mut clauses: Vec<Clause> = d.into_iter().filter_map(simplify_clause).collect();
    clauses.sort_by_key(|c| c.len());
    let mut kept: Vec<Clause> = Vec::with_capacity(clauses.len());
    for c in clauses {
        if !kept.iter().any(|k| k.is_subset(&c)) {
            kept.push(c);
        }
    }
    let empty_only: Clause = core::iter::once(rc(Node::Empty)).collect();
    if kept.len() > 1
        && kept.contains(&empty_only)
        && kept
            .iter()
            .any(|c| *c != empty_only && c.iter().all(|x| holds_on_empty(x)))
    {
        kept.retain(|c| *c != empty_only);
    }
    kept.into_iter().collect()
}

fn dnf_or(a: Dnf, b: Dnf) -> Dnf {
    let mut a = a;
    a.extend(b);
    simplify(a)
}

fn dnf_and(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Dnf::new();
    for x in a {
        for y in b {
            out.insert(x.union(y).cloned().collect());
        }
    }
    simplify(out)
}

pub(crate) fn dnf(n: &P) -> Dnf {
    match &**n {
        Node::False => Dnf::new(),
        Node::True => dnf_true(),
        Node::And(xs) => xs.iter().fold(dnf_true(), |acc, x| dnf_and(&acc, &dnf(x))),
        Node::Or(xs) => xs.iter().fold(Dnf::new(), |acc, x| dnf_or(acc, dnf(x))),
        _ => simplify(dnf_element(n.clone())),
    }
}

/// Progression with a per-element cache; one instance per letter.
pub(crate) struct Progressor<'a, L: Letter + ?Sized> {
    letter: &'a L,
    cache: BTreeMap<P, Dnf>,
}

impl<'a, L: Letter + ?Sized> Progressor<'a, L> {
    pub(crate) fn new(letter: &'a L) -> Self {
        Progressor {
            letter,
            cache: BTreeMap::new(),
        }
    }

    fn node(&mut self, n: &P) -> Dnf {
        if let Some(d) = self.cache.get(n) {
            return d.clone();
        }
        let out = match &**n {
            Node::False | Node::Empty => Dnf::new(),
            Node::True | Node::Nonempty => dnf_true(),
            Node::Lit(a, pos) => {
                if self.letter.holds(a) == *pos {
                    dnf_true()
                } else {
                    Dnf::new()
                }
            }
            Node::Next(x) => dnf_and(&dnf(x), &dnf_element(rc(Node::Nonempty))),
            Node::WeakNext(x) => dnf_or(dnf(x), dnf_element(rc(Node::Empty))),
            Node::Until(a, b) => {
                let stay = dnf_and(&self.node(a), &dnf_element(n.clone()));
                dnf_or(self.node(b), stay)
            }
            Node::Release(a, b) => {
                let stay = dnf_or(self.node(a), dnf_element(n.clone()));
                dnf_and(&self.node(b), &stay)
            }
            Node::And(xs) => {
                let mut acc = dnf_true();
                for x in xs {
                    acc = dnf_and(&acc, &self.node(x));
                }
                acc
            }
            Node::Or(xs) => {
                let mut acc = Dnf::new();
                for x in xs {
                    acc = dnf_or(acc, self.node(x));
                }
                acc
            }
        };
        self.cache.insert(n.clone(), out.clone());
        out
    }

    pub(crate) fn state(&mut self, d: &Dnf) -> Dnf {
        let mut out = Dnf::new();
        for clause in d {
            let mut acc = dnf_true();
            for e in clause {
                if acc.is_empty() {
                    break;
                }
                acc = dnf_and(&acc, &self.node(e));
            }
            out = dnf_or(out, acc);
        }
        out
    }
}

pub(crate) fn accepts_empty(d: &Dnf) -> bool {
    d.iter().any(|c| c.iter().all(|x| holds_on_empty(x)))
}

fn node_formula(n: &Node) -> Formula {
    let nonempty = || Formula::until(Formula::True, Formula::True);
    match n {
        Node::False => Formula::False,
        Node::True => Formula::True,
        Node::Lit(a, true) => Formula::atom(a.clone()),
        Node::Lit(a, false) => Formula::not(Formula::atom(a.clone())),
        Node::Nonempty => nonempty(),
        Node::Empty => Formula::not(nonempty()),
        Node::Next(x) => Formula::next(node_formula(x)),
        Node::WeakNext(x) => Formula::not(Formula::next(Formula::not(node_formula(x)))),
        Node::Until(a, b) => Formula::until(node_formula(a), node_formula(b)),
        Node::Release(a, b) => Formula::not(Formula::until(
            Formula::not(node_formula(a)),
            Formula::not(node_formula(b)),
        )),
        Node::And(xs) => fold(xs.iter().map(|x| node_formula(x)), Formula::and, Formula::True),
        Node::Or(xs) => fold(xs.iter().map(|x| node_formula(x)), Formula::or, Formula::False),
    }
}

fn fold(
    mut items: impl Iterator<Item = Formula>,
    op: fn(Formula, Formula) -> Formula,
    unit: Formula,
) -> Formula {
    match items.next() {
        None => unit,
        Some(first) => items.fold(first, op),
    }
}

pub(crate) fn dnf_formula(d: &Dnf) -> Formula {
    fold(
        d.iter().map(|c| {
            fold(
                c.iter().map(|x| node_formula(x)),
                Formula::and,
                Formula::True,
            )
        }),
        Formula::or,
        Formula::False,
    )
}

pub(crate) fn initial_state(f: &Formula) -> Dnf {
    dnf(&nnf(f, false))
}

/// Normal form used for DFA states; semantically equivalent to the input
/// and idempotent.
pub fn canonicalize(formula: &Formula) -> Formula {
    dnf_formula(&initial_state(formula))
}

/// The residual obligation after reading `symbol`: for every trace `w`,
/// `symbol·w ⊨ formula` iff `w ⊨ progress(formula, symbol)`.
pub fn progress<L: Letter + ?Sized>(formula: &Formula, symbol: &L) -> Formula {
    dnf_formula(&Progressor::new(symbol).state(&initial_state(formula)))
}
