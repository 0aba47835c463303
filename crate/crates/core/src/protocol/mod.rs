//! The distillation iterate and the strategies built from it.
//!
//! One iterate consumes a heralded broker pair: both brokers are rotated by
//! `(1 + iY)/√2`, each is entangled with its client through a controlled-Z,
//! and both brokers are measured in the X basis. The outcome `(i, j)` applies
//! a parity projection (opposite to the parity of `i ⊕ j`) dressed by an
//! asymmetry operator, or, with weight η, a projection onto `|i, j⟩`.

mod iterate;
mod montecarlo;
mod run;
mod tree;

pub use iterate::{
    iterate_closed_form, run_iterate_circuit, run_iterate_exact, BrokerResource, IterateBranch,
    IterateOutcome,
};
pub use montecarlo::{
    run_trajectories, run_trajectories_with_records, simulate_trial, write_records_csv,
    SampleStats, TrialRecord, TrialStatus,
};
pub use run::{classify, parity_projected_target, DistillationRun, RunStatus};
pub use tree::{
    run_strategy_exact, run_strategy_with_brokers, OutcomeTree, Strategy, StrategyConfig, TreeLeaf,
};
