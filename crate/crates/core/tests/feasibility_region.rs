use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cmdpst_core::ltlf::{compile_dfa, Formula};
use cmdpst_core::oracle::enumerate_feasible_paths;
use cmdpst_core::random::{random_cmdpst, RandomModelParams};
use cmdpst_core::{
    build_product, build_unrolled, check_target_feasible, feasible_region, is_feasible_path,
    path_cost, prune, AcceptanceMode, ActionId, Cmdpst, FinitePath, StateId, TargetMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> RandomModelParams {
    RandomModelParams {
        max_states: 8,
        ..RandomModelParams::default()
    }
}

/// A feasible path ending in `target` whose last segment is as cheap as
/// possible, found by breadth-first search over `(state, segment cost)`.
fn cheapest_witness(model: &Cmdpst, target: StateId) -> Option<FinitePath> {
    type Node = (StateId, u32);
    let start: Node = (model.initial(), 0);
    let mut parent: BTreeMap<Node, Option<(Node, ActionId)>> = BTreeMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some((s, c)) = queue.pop_front() {
        for ch in model.choices(s) {
            let spent = c + ch.cost;
            if spent > model.cap() {
                continue;
            }
            for t in ch.successor_union() {
                let next = (t, if model.is_reload(t) { 0 } else { spent });
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some(((s, c), ch.action)));
                    queue.push_back(next);
                }
            }
        }
    }
    let best = parent.keys().filter(|(s, _)| *s == target).map(|&(_, c)| c).min()?;
    let mut node = (target, best);
    let mut states = vec![node.0];
    let mut actions = Vec::new();
    while let Some(Some((prev, a))) = parent.get(&node) {
        states.push(prev.0);
        actions.push(*a);
        node = *prev;
    }
    states.reverse();
    actions.reverse();
    FinitePath::from_parts(states, actions)
}

fn random_path(model: &Cmdpst, rng: &mut ChaCha8Rng, len: usize) -> FinitePath {
    let mut p = FinitePath::new(model.initial());
    for _ in 0..len {
        let choices = model.choices(p.last());
        if choices.is_empty() {
            break;
        }
        let c = &choices[rng.random_range(0..choices.len())];
        let o = &c.outcomes[rng.random_range(0..c.outcomes.len())];
        let t = o.successors[rng.random_range(0..o.successors.len())];
        p.push(c.action, t);
    }
    p
}

#[test]
fn region_equals_feasible_endpoints_and_unrolled_projection() {
    for seed in 0..60 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &params());
        let region = feasible_region(&m);
        let bound = m.num_states() * (m.cap() as usize + 1);
        let oracle = enumerate_feasible_paths(&m, bound);
        let got: BTreeSet<StateId> = region.states().collect();
        let want: BTreeSet<StateId> = oracle.keys().copied().collect();
        assert_eq!(got, want, "seed {seed}");
        for (&s, &c) in &oracle {
            assert_eq!(region.min_cost(s), Some(c), "seed {seed}, state {s:?}");
        }

        let dfa = compile_dfa(&Formula::True, m.atoms()).unwrap();
        let product = build_product(&m, &dfa, AcceptanceMode::Lag).unwrap();
        let unrolled = build_unrolled(&product);
        let projected: BTreeSet<StateId> = (0..unrolled.num_states())
            .map(|u| product.origin(unrolled.origin(StateId(u)).0).0)
            .collect();
        assert_eq!(projected, want, "seed {seed}");
    }
}

#[test]
fn region_is_closed_under_admitted_actions() {
    for seed in 0..60 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &params());
        let region = feasible_region(&m);
        for s in region.states() {
            let enabled: Vec<ActionId> = m.choices(s).iter().map(|c| c.action).collect();
            for a in region.actions(s) {
                assert!(enabled.contains(a));
                for t in m.choice(s, *a).unwrap().successor_union() {
                    assert!(region.contains(t), "seed {seed}");
                }
            }
        }
        assert!(region.relaxations() <= m.num_states() * (m.cap() as usize + 1));
    }
}

#[test]
fn extensions_of_the_cheapest_witness() {
    for seed in 0..60 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &params());
        let region = feasible_region(&m);
        for s in region.states() {
            let w = cheapest_witness(&m, s).expect("feasible states have witnesses");
            assert!(is_feasible_path(&m, &w).unwrap());
            for c in m.choices(s) {
                let admitted = region.actions(s).contains(&c.action);
                for t in c.successor_union() {
                    let mut ext = w.clone();
                    ext.push(c.action, t);
                    assert_eq!(is_feasible_path(&m, &ext).unwrap(), admitted, "seed {seed}");
                }
            }
        }
    }
}

#[test]
fn feasibility_is_prefix_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..40 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &params());
        for _ in 0..20 {
            let p = random_path(&m, &mut rng, 10);
            let full = is_feasible_path(&m, &p).unwrap();
            let mut prev_cost = 0;
            for k in 0..=p.len() {
                let q = p.prefix(k);
                if full {
                    assert!(is_feasible_path(&m, &q).unwrap());
                }
                let c = path_cost(&m, &q).unwrap();
                assert!(c >= prev_cost);
                prev_cost = c;
            }
        }
    }
}

#[test]
fn pruning_keeps_the_region() {
    for seed in 0..40 {
        let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(seed), &params());
        let region = feasible_region(&m);
        let p = prune(&m);
        assert_eq!(p.kept, region.states().collect::<Vec<_>>());
        assert_eq!(p.model.state_name(p.model.initial()), m.state_name(m.initial()));
        assert_eq!(p.report.states_after + p.report.removed_states, m.num_states());
        let again = prune(&p.model);
        assert_eq!(again.report.removed_states, 0);
        assert_eq!(again.report.removed_actions, 0);
    }
}

#[test]
fn target_checks() {
    let m = random_cmdpst(&mut ChaCha8Rng::seed_from_u64(3), &params());
    let init = check_target_feasible(&m, &[m.initial()], TargetMode::Any).unwrap();
    assert!(init.satisfied);
    assert!(!check_target_feasible(&m, &[], TargetMode::Any).unwrap().satisfied);
    assert!(check_target_feasible(&m, &[], TargetMode::All).unwrap().satisfied);
    assert!(check_target_feasible(&m, &[StateId(99)], TargetMode::Any).is_err());
}
