//! Robust strategy synthesis for consumption MDPs with set-valued transitions.
//!
//! The pipeline compiles an LTLf task to a DFA, builds the product with the
//! model, unrolls resource levels into the state space (optionally after
//! pruning to the feasible region), and solves a max-min reachability
//! problem by value iteration. The resulting memoryless table is lifted to a
//! finite-memory strategy over the original model.
//!
//! This crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod feasibility;
pub mod ltlf;
pub mod model;
pub mod oracle;
pub mod product;
pub mod random;
pub mod simulate;
pub mod synthesis;
pub mod unroll;
pub mod warehouse;

pub use feasibility::{
    check_target_feasible, feasible_region, prune, prune_product, FeasibleRegion, Pruned, PruneReport,
    TargetMode, TargetReport,
};
pub use ltlf::{compile_dfa, eval_trace, parse_ltlf, Dfa, DfaError, DfaState, Formula};
pub use model::{
    enumerate_successors, is_feasible_path, path_cost, robust_expectation, validate_model,
    ActionId, AtomSet, Choice, Cmdpst, FinitePath, Mdpst, ModelDescription, ModelError,
    Outcome, StateId, Violation,
};
pub use product::{accepting_reachable, build_product, AcceptanceMode, ProductCmdpst};
pub use oracle::{enumerate_feasible_paths, exact_value, TinyInstanceLimits};
pub use simulate::{estimate, run_episode, EpisodeOutcome, EstimateReport, NatureKind, Termination};
pub use synthesis::{
    check_beta, extract_strategy, robust_value_iteration, synthesize, synthesize_with, Decision,
    FiniteMemoryStrategy, Memory, Pipeline, SolveOptions, SynthesisConfig, SynthesisError,
    SynthesisResult, SynthesisStats, Task, ValueFunction,
};
pub use unroll::{
    build_unrolled, build_unrolled_grid, lift_path, project_path, Lifted, UnrolledMdpst,
};
pub use warehouse::{gen_warehouse, WarehouseSpec};
