//! Grid warehouse models.
//!
//! Cells are numbered from 1 in a column-major snake: column 1 runs top to
//! bottom, column 2 bottom to top, and so on. On a 4×4 grid, moving RIGHT
//! from cell 2 enters cell 7 and cell 13 is the bottom-right corner.
//!
//! A move towards cell `i` succeeds with probability `p_success`; otherwise
//! it slips to cell `i − 1` (when `i > 1`; at `i = 1` the slip mass stays on
//! the success outcome). With the adversarial shift enabled, `i > 2` and `i`
//! in the shift zone, nature may also redirect either outcome to `i − 2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Cmdpst, ModelDescription, ModelError, OutcomeDescription, TransitionDescription};

pub const DIRECTIONS: [&str; 4] = ["UP", "DOWN", "LEFT", "RIGHT"];
pub const ATOMS: [&str; 4] = ["Wd", "Wo", "Wp", "Wt"];
pub const DEFAULT_FORMULA: &str = "!Wo U Wd";
const SHORTCUT: &str = "SHORTCUT";

#[derive(Clone, Debug, PartialEq)]
pub struct WarehouseSpec {
    pub rows: usize,
    pub cols: usize,
    /// Start cell of each agent; the agent count is its length.
    pub starts: Vec<usize>,
    pub reload: Vec<usize>,
    pub obstacles: Vec<usize>,
    pub pickup: Vec<usize>,
    pub transfer: Vec<usize>,
    pub delivery: Vec<usize>,
    /// Cost of UP, DOWN, LEFT, RIGHT.
    pub costs: [u32; 4],
    pub p_success: f64,
    pub adversarial_shift: bool,
    /// Intended cells whose moves are exposed to the shift; `None` means all.
    pub shift_cells: Option<Vec<usize>>,
    pub cap: u32,
    /// Probability that a cell gets an extra SHORTCUT action to a random cell.
    pub shortcut_density: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum WarehouseError {
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
    #[error("cell {0} is outside the grid")]
    OutOfRange(usize),
    #[error("cell {0} has more than one role")]
    OverlappingRoles(usize),
    #[error("start cell {0} is an obstacle")]
    StartOnObstacle(usize),
    #[error("at least one agent is required")]
    NoAgents,
    #[error("two agents start on cell {0}")]
    SharedStart(usize),
    #[error("success probability must lie in (0, 1], got {0}")]
    Probability(f64),
    #[error("generated model is invalid: {0}")]
    Model(#[from] ModelError),
}

impl WarehouseSpec {
    /// The 4×4 single-agent layout: start 1, reload 7, obstacles 10 and 11,
    /// delivery 13.
    pub fn example() -> WarehouseSpec {
        WarehouseSpec {
            rows: 4,
            cols: 4,
            starts: vec![1],
            reload: vec![7],
            obstacles: vec![10, 11],
            pickup: vec![],
            transfer: vec![],
            delivery: vec![13],
            costs: [1, 1, 2, 2],
            p_success: 0.8,
            adversarial_shift: true,
            shift_cells: None,
            cap: 5,
            shortcut_density: 0.0,
            seed: 0,
        }
    }

    /// Default benchmark family on an `n × n` grid.
    ///
    /// Start in cell 1, deliver in the bottom-right corner. Column `n − 1`
    /// is blocked in rows `2..n−1` and reloads sit on every cell whose row
    /// and column are both 2 mod 3. Every move costs 2 and `cap = 2n + 3`.
    /// The shift applies to moves into interior cells left of the blocked
    /// column (rows `2..n−1`, columns `1..n−2`).
    pub fn benchmark(n: usize) -> WarehouseSpec {
        let mut spec = WarehouseSpec {
            rows: n,
            cols: n,
            starts: vec![1],
            reload: vec![],
            obstacles: vec![],
            pickup: vec![],
            transfer: vec![],
            delivery: vec![],
            costs: [2; 4],
            p_success: 0.8,
            adversarial_shift: true,
            shift_cells: Some(vec![]),
            cap: 2 * n as u32 + 3,
            shortcut_density: 0.0,
            seed: 0,
        };
        if n == 0 {
            return spec;
        }
        spec.delivery = vec![spec.cell(n, n)];
        if n >= 3 {
            spec.obstacles = (2..n).map(|r| spec.cell(r, n - 1)).collect();
        }
        let mut zone = Vec::new();
        for c in 1..=n {
            for r in 1..=n {
                let cell = spec.cell(r, c);
                if r > 1 && r < n && c + 2 <= n {
                    zone.push(cell);
                }
                if r % 3 == 2
                    && c % 3 == 2
                    && cell != 1
                    && !spec.obstacles.contains(&cell)
                    && !spec.delivery.contains(&cell)
                {
                    spec.reload.push(cell);
                }
            }
        }
        spec.shift_cells = Some(zone);
        spec
    }

    pub fn num_cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Cell number of 1-based `(row, col)`.
    pub fn cell(&self, row: usize, col: usize) -> usize {
        let offset = if col % 2 == 1 { row - 1 } else { self.rows - row };
        (col - 1) * self.rows + offset + 1
    }

    /// 1-based `(row, col)` of a cell.
    pub fn position(&self, cell: usize) -> (usize, usize) {
        let col = (cell - 1) / self.rows + 1;
        let offset = (cell - 1) % self.rows;
        let row = if col % 2 == 1 { offset + 1 } else { self.rows - offset };
        (row, col)
    }

    fn neighbour(&self, cell: usize, dir: usize) -> Option<usize> {
        let (r, c) = self.position(cell);
        let (r2, c2) = match dir {
            0 if r > 1 => (r - 1, c),
            1 if r < self.rows => (r + 1, c),
            2 if c > 1 => (r, c - 1),
            3 if c < self.cols => (r, c + 1),
            _ => return None,
        };
        Some(self.cell(r2, c2))
    }

    fn validate(&self) -> Result<(), WarehouseError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(WarehouseError::EmptyGrid);
        }
        if !(self.p_success > 0.0 && self.p_success <= 1.0) {
            return Err(WarehouseError::Probability(self.p_success));
        }
        if self.starts.is_empty() {
            return Err(WarehouseError::NoAgents);
        }
        let roles = [&self.reload, &self.obstacles, &self.pickup, &self.transfer, &self.delivery];
        let mut seen = vec![false; self.num_cells() + 1];
        let zone = self.shift_cells.iter().flatten();
        for &cell in roles.iter().flat_map(|r| r.iter()).chain(&self.starts).chain(zone) {
            if cell == 0 || cell > self.num_cells() {
                return Err(WarehouseError::OutOfRange(cell));
            }
        }
        for &cell in roles.iter().flat_map(|r| r.iter()) {
            if core::mem::replace(&mut seen[cell], true) {
                return Err(WarehouseError::OverlappingRoles(cell));
            }
        }
        let mut started = vec![false; self.num_cells() + 1];
        for &s in &self.starts {
            if self.obstacles.contains(&s) {
                return Err(WarehouseError::StartOnObstacle(s));
            }
            if core::mem::replace(&mut started[s], true) {
                return Err(WarehouseError::SharedStart(s));
            }
        }
        Ok(())
    }

    fn label(&self, cell: usize) -> Vec<&'static str> {
        let mut l = Vec::new();
        if self.delivery.contains(&cell) {
            l.push("Wd");
        }
        if self.obstacles.contains(&cell) {
            l.push("Wo");
        }
        if self.pickup.contains(&cell) {
            l.push("Wp");
        }
        if self.transfer.contains(&cell) {
            l.push("Wt");
        }
        l
    }

    /// Outcomes of an attempted move into `target`.
    fn move_outcomes(&self, target: usize) -> Vec<(f64, Vec<usize>)> {
        let exposed = self.shift_cells.as_ref().is_none_or(|z| z.contains(&target));
        let shift = (self.adversarial_shift && exposed && target > 2).then(|| target - 2);
        let with_shift = |c: usize| {
            let mut set = vec![c];
            set.extend(shift);
            set
        };
        if target > 1 && self.p_success < 1.0 {
            vec![
                (self.p_success, with_shift(target)),
                (1.0 - self.p_success, with_shift(target - 1)),
            ]
        } else {
            vec![(1.0, with_shift(target))]
        }
    }
}

struct Move {
    action: &'static str,
    cost: u32,
    outcomes: Vec<(f64, Vec<usize>)>,
}

fn local_moves(spec: &WarehouseSpec) -> Vec<Vec<Move>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shortcut_cost = 2 * spec.costs.iter().copied().max().unwrap_or(1);
    let mut moves = vec![Vec::new()];
    for cell in 1..=spec.num_cells() {
        let mut row: Vec<Move> = (0..4)
            .filter_map(|d| {
                spec.neighbour(cell, d).map(|t| Move {
                    action: DIRECTIONS[d],
                    cost: spec.costs[d],
                    outcomes: spec.move_outcomes(t),
                })
            })
            .collect();
        if spec.shortcut_density > 0.0
            && spec.num_cells() > 1
            && rng.random::<f64>() < spec.shortcut_density
        {
            let mut target = rng.random_range(1..spec.num_cells());
            if target >= cell {
                target += 1;
            }
            let outcomes = if spec.p_success < 1.0 {
                vec![(spec.p_success, vec![target]), (1.0 - spec.p_success, vec![cell])]
            } else {
                vec![(1.0, vec![target])]
            };
            row.push(Move {
                action: SHORTCUT,
                cost: shortcut_cost,
                outcomes,
            });
        }
        moves.push(row);
    }
    moves
}

fn joint_name(cells: &[usize]) -> String {
    if cells.len() == 1 {
        return cells[0].to_string();
    }
    let parts: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

fn collides(cells: &[usize]) -> bool {
    cells.iter().enumerate().any(|(i, c)| cells[i + 1..].contains(c))
}

/// Advances a mixed-radix counter; false after wrapping.
fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// Builds the warehouse model and its default task formula.
///
/// With several agents the state space is every collision-free placement
/// in lexicographic order, joint actions are `+`-joined move names, and a
/// joint action is disabled when any of its outcomes could put two agents
/// on one cell. Probabilities multiply, successor sets are cartesian
/// products, costs add, labels are unions and a joint state reloads when
/// any agent stands on a reload cell.
pub fn gen_warehouse(spec: &WarehouseSpec) -> Result<(Cmdpst, String), WarehouseError> {
    spec.validate()?;
    let k = spec.starts.len();
    let n = spec.num_cells();
    let moves = local_moves(spec);

    let mut states: Vec<Vec<usize>> = Vec::new();
    let mut cells = vec![1usize; k];
    let radix = vec![n; k];
    let mut digits = vec![0usize; k];
    loop {
        for (c, &d) in cells.iter_mut().zip(&digits) {
            *c = d + 1;
        }
        if !collides(&cells) {
            states.push(cells.clone());
        }
        if !advance(&mut digits, &radix) {
            break;
        }
    }

    let mut desc = ModelDescription {
        states: states.iter().map(|c| joint_name(c)).collect(),
        initial: joint_name(&spec.starts),
        atoms: ATOMS.iter().map(|a| a.to_string()).collect(),
        cap: spec.cap,
        ..ModelDescription::default()
    };
    let mut action_names: Vec<String> = Vec::new();
    let mut enabled: BTreeMap<String, Vec<String>> = BTreeMap::new();

    for joint in &states {
        let name = joint_name(joint);
        let mut label: Vec<String> = Vec::new();
        for &c in joint {
            for a in spec.label(c) {
                if !label.iter().any(|l| l == a) {
                    label.push(a.to_string());
                }
            }
        }
        label.sort();
        if !label.is_empty() {
            desc.labels.insert(name.clone(), label);
        }
        if joint.iter().any(|c| spec.reload.contains(c)) {
            desc.reload.push(name.clone());
        }

        let per_agent: Vec<&Vec<Move>> = joint.iter().map(|&c| &moves[c]).collect();
        let mut here = Vec::new();
        if per_agent.iter().all(|m| !m.is_empty()) {
            let radices: Vec<usize> = per_agent.iter().map(|m| m.len()).collect();
            let mut pick = vec![0usize; k];
            loop {
                let chosen: Vec<&Move> = pick.iter().zip(&per_agent).map(|(&i, m)| &m[i]).collect();
                if let Some(t) = joint_transition(&chosen) {
                    let action = chosen.iter().map(|m| m.action).collect::<Vec<_>>().join("+");
                    if !action_names.contains(&action) {
                        action_names.push(action.clone());
                    }
                    let cost = chosen.iter().map(|m| m.cost).sum();
                    desc.costs.entry(name.clone()).or_default().insert(action.clone(), cost);
                    desc.transitions.push(TransitionDescription {
                        from: name.clone(),
                        action: action.clone(),
                        outcomes: t,
                    });
                    here.push(action);
                }
                if !advance(&mut pick, &radices) {
                    break;
                }
            }
        }
        enabled.insert(name, here);
    }
    desc.actions = action_names;
    desc.enabled = Some(enabled);
    let model = Cmdpst::from_description(&desc)?;
    Ok((model, DEFAULT_FORMULA.to_string()))
}

/// Joint outcomes of one move per agent, or `None` on a possible collision.
fn joint_transition(chosen: &[&Move]) -> Option<Vec<OutcomeDescription>> {
    let radices: Vec<usize> = chosen.iter().map(|m| m.outcomes.len()).collect();
    let mut pick = vec![0usize; chosen.len()];
    let mut out = Vec::new();
    loop {
        let parts: Vec<&(f64, Vec<usize>)> =
            pick.iter().zip(chosen).map(|(&i, m)| &m.outcomes[i]).collect();
        let prob = parts.iter().map(|p| p.0).product();
        let set_radix: Vec<usize> = parts.iter().map(|p| p.1.len()).collect();
        let mut member = vec![0usize; parts.len()];
        let mut set = Vec::new();
        loop {
            let cells: Vec<usize> = member.iter().zip(&parts).map(|(&i, p)| p.1[i]).collect();
            if collides(&cells) {
                return None;
            }
            set.push(joint_name(&cells));
            if !advance(&mut member, &set_radix) {
                break;
            }
        }
        out.push(OutcomeDescription { prob, set });
        if !advance(&mut pick, &radices) {
            break;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enumerate_successors, validate_model};

    #[test]
    fn numbering_matches_layout() {
        let spec = WarehouseSpec::example();
        assert_eq!(spec.cell(1, 1), 1);
        assert_eq!(spec.cell(2, 2), 7);
        assert_eq!(spec.cell(4, 4), 13);
        assert_eq!(spec.neighbour(2, 3), Some(7));
        for c in 1..=16 {
            let (r, col) = spec.position(c);
            assert_eq!(spec.cell(r, col), c);
        }
    }

    #[test]
    fn example_right_from_two() {
        let (m, f) = gen_warehouse(&WarehouseSpec::example()).unwrap();
        assert_eq!(f, "!Wo U Wd");
        assert!(validate_model(&m.to_description()).is_empty());
        let s2 = m.state_by_name("2").unwrap();
        let right = m.action_by_name("RIGHT").unwrap();
        let c = m.choice(s2, right).unwrap();
        assert_eq!(c.cost, 2);
        let sets: Vec<(f64, Vec<&str>)> = c
            .outcomes
            .iter()
            .map(|o| (o.prob, o.successors.iter().map(|&t| m.state_name(t)).collect()))
            .collect();
        assert_eq!(sets.len(), 2);
        assert!(sets.contains(&(0.8, vec!["5", "7"])));
        assert!(sets.iter().any(|(p, s)| (p - 0.2).abs() < 1e-12 && *s == vec!["5", "6"]));
        let succ: Vec<&str> = enumerate_successors(&m, s2, right)
            .unwrap()
            .into_iter()
            .map(|t| m.state_name(t))
            .collect();
        assert_eq!(succ, vec!["5", "6", "7"]);
        assert!(m.is_reload(m.state_by_name("7").unwrap()));
        assert_eq!(m.cap(), 5);
    }

    #[test]
    fn left_boundary_folds_slip() {
        let (m, _) = gen_warehouse(&WarehouseSpec::example()).unwrap();
        let s2 = m.state_by_name("2").unwrap();
        let up = m.action_by_name("UP").unwrap();
        let c = m.choice(s2, up).unwrap();
        assert_eq!(c.outcomes.len(), 1);
        assert_eq!(c.outcomes[0].prob, 1.0);
    }

    #[test]
    fn two_agents_never_share_a_cell() {
        let spec = WarehouseSpec {
            rows: 2,
            cols: 2,
            starts: vec![1, 3],
            reload: vec![],
            obstacles: vec![],
            delivery: vec![4],
            ..WarehouseSpec::example()
        };
        let (m, _) = gen_warehouse(&spec).unwrap();
        assert_eq!(m.num_states(), 12);
        for s in m.states() {
            let name = m.state_name(s);
            let inner = &name[1..name.len() - 1];
            let cells: Vec<&str> = inner.split(',').collect();
            assert_ne!(cells[0], cells[1]);
        }
    }

    #[test]
    fn role_errors() {
        let mut spec = WarehouseSpec::example();
        spec.reload.push(10);
        assert_eq!(gen_warehouse(&spec).unwrap_err(), WarehouseError::OverlappingRoles(10));
        let mut spec = WarehouseSpec::example();
        spec.starts = vec![10];
        assert_eq!(gen_warehouse(&spec).unwrap_err(), WarehouseError::StartOnObstacle(10));
    }

    #[test]
    fn benchmark_four_is_the_example_layout() {
        let b = WarehouseSpec::benchmark(4);
        assert_eq!(b.obstacles, vec![10, 11]);
        assert_eq!(b.reload, vec![7]);
        assert_eq!(b.delivery, vec![13]);
        for n in 2..=10 {
            gen_warehouse(&WarehouseSpec::benchmark(n)).unwrap();
        }
    }

    #[test]
    fn shortcuts_are_seeded() {
        let mut spec = WarehouseSpec::benchmark(4);
        spec.shortcut_density = 0.5;
        spec.seed = 9;
        let (a, _) = gen_warehouse(&spec).unwrap();
        let (b, _) = gen_warehouse(&spec).unwrap();
        assert_eq!(a, b);
        assert!(a.action_by_name("SHORTCUT").is_some());
    }
}
