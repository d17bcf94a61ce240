//! Brute-force reference computations for tiny instances.
//!
//! Nothing here shares code with value iteration or the feasible-region
//! search; tests compare the two sides.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{Cmdpst, Mdpst, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TinyInstanceLimits {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_outcomes: usize,
    pub max_set_size: usize,
}

impl Default for TinyInstanceLimits {
    fn default() -> Self {
        TinyInstanceLimits {
            max_states: 6,
            max_actions: 2,
            max_outcomes: 2,
            max_set_size: 2,
        }
    }
}

/// Hard bound on strategy × nature combinations.
pub const MAX_ENUMERATION: u128 = 1_000_000;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance exceeds oracle limits: {0}")]
    Limits(&'static str),
    #[error("{0} strategy/nature combinations exceed {MAX_ENUMERATION}")]
    TooMany(u128),
    #[error("linear solve residual {0:e} exceeds 1e-12")]
    Residual(f64),
}

fn check_limits(m: &Mdpst, limits: &TinyInstanceLimits) -> Result<u128, OracleError> {
    if m.num_states() > limits.max_states {
        return Err(OracleError::Limits("too many states"));
    }
    let mut count: u128 = 1;
    for s in m.states() {
        let choices = m.choices(s);
        if choices.len() > limits.max_actions {
            return Err(OracleError::Limits("too many actions"));
        }
        count = count.saturating_mul(choices.len().max(1) as u128);
        for c in choices {
            if c.outcomes.len() > limits.max_outcomes {
                return Err(OracleError::Limits("too many successor sets"));
            }
            for o in &c.outcomes {
                if o.successors.len() > limits.max_set_size {
                    return Err(OracleError::Limits("successor set too large"));
                }
                count = count.saturating_mul(o.successors.len() as u128);
            }
        }
    }
    if count > MAX_ENUMERATION {
        return Err(OracleError::TooMany(count));
    }
    Ok(count)
}

/// Mixed-radix counter over `radices`; returns false after the last digit wraps.
fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Reachability probabilities of `winning` in a Markov chain given as
/// sparse rows, by Gaussian elimination with partial pivoting.
fn chain_reachability(rows: &[Vec<(usize, f64)>], winning: &[bool]) -> Result<Vec<f64>, OracleError> {
    let n = rows.len();
    // States that can reach the winning set at all.
    let mut can = winning.to_vec();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !can[s] && rows[s].iter().any(|&(t, p)| p > 0.0 && can[t]) {
                can[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let unknown: Vec<usize> = (0..n).filter(|&s| can[s] && !winning[s]).collect();
    let pos: BTreeMap<usize, usize> = unknown.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let k = unknown.len();
    let mut a = vec![vec![0.0f64; k]; k];
    let mut b = vec![0.0f64; k];
    for (i, &s) in unknown.iter().enumerate() {
        a[i][i] += 1.0;
        for &(t, p) in &rows[s] {
            if winning[t] {
                b[i] += p;
            } else if let Some(&j) = pos.get(&t) {
                a[i][j] -= p;
            }
        }
    }
    let (a0, b0) = (a.clone(), b.clone());
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty range");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (top, rest) = a.split_at_mut(r);
                for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0f64; k];
    for r in (0..k).rev() {
        let mut acc = b[r];
        for c in r + 1..k {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    let residual = (0..k)
        .map(|r| {
            let lhs: f64 = (0..k).map(|c| a0[r][c] * x[c]).sum();
            (lhs - b0[r]).abs()
        })
        .fold(0.0, f64::max);
    if residual > 1e-12 {
        return Err(OracleError::Residual(residual));
    }
    let mut out: Vec<f64> = winning.iter().map(|&w| if w { 1.0 } else { 0.0 }).collect();
    for (i, &s) in unknown.iter().enumerate() {
        out[s] = x[i];
    }
    Ok(out)
}

/// `max` over deterministic memoryless strategies of `min` over point-mass
/// natures of the probability of reaching `winning`, per state.
pub fn exact_value(
    m: &Mdpst,
    winning: &[bool],
    limits: &TinyInstanceLimits,
) -> Result<Vec<f64>, OracleError> {
    check_limits(m, limits)?;
    let n = m.num_states();
    let strategy_radix: Vec<usize> = m.states().map(|s| m.choices(s).len().max(1)).collect();
    let mut strategy = vec![0usize; n];
    let mut best = vec![0.0f64; n];
    loop {
        // Nature digits: one per (state, outcome) of the chosen actions.
        let mut slots: Vec<(usize, usize)> = Vec::new();
        let mut radix = Vec::new();
        for s in m.states() {
            if winning[s.0] || m.choices(s).is_empty() {
                continue;
            }
            for (oi, o) in m.choices(s)[strategy[s.0]].outcomes.iter().enumerate() {
                slots.push((s.0, oi));
                radix.push(o.successors.len());
            }
        }
        let mut nature = vec![0usize; slots.len()];
        let mut worst = vec![f64::INFINITY; n];
        loop {
            let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
            for (slot, &(s, oi)) in slots.iter().enumerate() {
                let o = &m.choices(StateId(s))[strategy[s]].outcomes[oi];
                rows[s].push((o.successors[nature[slot]].0, o.prob));
            }
            let reach = chain_reachability(&rows, winning)?;
            for s in 0..n {
                worst[s] = worst[s].min(reach[s]);
            }
            if !advance(&mut nature, &radix) {
                break;
            }
        }
        for s in 0..n {
            best[s] = best[s].max(worst[s]);
        }
        if !advance(&mut strategy, &strategy_radix) {
            break;
        }
    }
    Ok(best)
}

/// Endpoints of feasible paths with at most `max_len` actions, each with
/// the smallest segment cost it can be entered with.
///
/// Depth-first search memoized on `(state, segment cost)`; a state's first
/// visit at some cost explores all its affordable actions.
pub fn enumerate_feasible_paths(model: &Cmdpst, max_len: usize) -> BTreeMap<StateId, u32> {
    fn visit(
        model: &Cmdpst,
        s: StateId,
        cost: u32,
        depth: usize,
        max_len: usize,
        best_depth: &mut BTreeMap<(StateId, u32), usize>,
        out: &mut BTreeMap<StateId, u32>,
    ) {
        match best_depth.get(&(s, cost)) {
            Some(&d) if d <= depth => return,
            _ => {
                best_depth.insert((s, cost), depth);
            }
        }
        let e = out.entry(s).or_insert(cost);
        *e = (*e).min(cost);
        if depth == max_len {
            return;
        }
        for c in model.choices(s) {
            let spent = cost + c.cost;
            if spent > model.cap() {
                continue;
            }
            for o in &c.outcomes {
                for &t in &o.successors {
                    let next = if model.is_reload(t) { 0 } else { spent };
                    visit(model, t, next, depth + 1, max_len, best_depth, out);
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    let mut best_depth = BTreeMap::new();
    visit(model, model.initial(), 0, 0, max_len, &mut best_depth, &mut out);
    out
}
