use serde::{Deserialize, Serialize};

use super::iterate::{run_iterate_circuit, IterateOutcome};
use super::run::{classify, RunStatus};
use crate::error::{Error, Result};
use crate::photonics::HeraldedPair;
use crate::qstate::DensityMatrix;
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Stop after two iterates; an undecided run is abandoned.
    TwoIterOnly,
    /// Keep iterating until success, a parity flip, or `max_iterates`.
    Loop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub mode: Strategy,
    pub max_iterates: usize,
    pub rng_seed: u64,
}

impl StrategyConfig {
    pub fn two_iter_only(rng_seed: u64) -> Self {
        Self {
            mode: Strategy::TwoIterOnly,
            max_iterates: 2,
            rng_seed,
        }
    }

    pub fn looped(max_iterates: usize, rng_seed: u64) -> Result<Self> {
        Self {
            mode: Strategy::Loop,
            max_iterates,
            rng_seed,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.max_iterates < 2 {
            return Err(Error::param(
                "max_iterates",
                format!("{} is below the minimum of 2", self.max_iterates),
            ));
        }
        Ok(self)
    }

    /// Number of iterates after which an undecided run is given up.
    pub fn horizon(&self) -> usize {
        match self.mode {
            Strategy::TwoIterOnly => 2,
            Strategy::Loop => self.max_iterates,
        }
    }
}

/// A terminal node of the exhaustive outcome tree.
#[derive(Debug, Clone)]
pub struct TreeLeaf {
    pub history: Vec<IterateOutcome>,
    pub probability: f64,
    /// Normalized client state at the leaf.
    pub final_clients: DensityMatrix,
    /// `Pending` marks runs cut off at the strategy horizon.
    pub status: RunStatus,
}

#[derive(Debug, Clone, Default)]
pub struct OutcomeTree {
    pub leaves: Vec<TreeLeaf>,
}

impl OutcomeTree {
    fn mass(&self, keep: impl Fn(RunStatus) -> bool) -> f64 {
        self.leaves
            .iter()
            .filter(|l| keep(l.status))
            .map(|l| l.probability)
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.mass(|_| true)
    }

    pub fn success_probability(&self) -> f64 {
        self.mass(RunStatus::is_success)
    }

    /// Parity-flip failures only.
    pub fn failure_probability(&self) -> f64 {
        self.mass(|s| s == RunStatus::Failure)
    }

    /// Runs still undecided at the horizon.
    pub fn pending_probability(&self) -> f64 {
        self.mass(|s| s == RunStatus::Pending)
    }

    /// `Σ k·p` over leaves that concluded by success or parity flip.
    pub fn concluded_iterate_moment(&self) -> f64 {
        self.leaves
            .iter()
            .filter(|l| l.status != RunStatus::Pending)
            .map(|l| l.history.len() as f64 * l.probability)
            .sum()
    }

    /// Success and failure mass by iterate count, indexed by `k`.
    pub fn by_iterate(&self) -> (Vec<f64>, Vec<f64>) {
        let depth = self
            .leaves
            .iter()
            .map(|l| l.history.len())
            .max()
            .unwrap_or(0);
        let mut success = vec![0.0; depth + 1];
        let mut failure = vec![0.0; depth + 1];
        for l in &self.leaves {
            let k = l.history.len();
            if l.status.is_success() {
                success[k] += l.probability;
            } else if l.status == RunStatus::Failure {
                failure[k] += l.probability;
            }
        }
        (success, failure)
    }
}

/// Exhaustive outcome tree with every iterate evolved through the circuit.
pub fn run_strategy_exact(
    clients: &DensityMatrix,
    pair: &HeraldedPair,
    cfg: &StrategyConfig,
) -> Result<OutcomeTree> {
    run_strategy_with_brokers(clients, &pair.to_density_matrix(), cfg)
}

/// As [`run_strategy_exact`] for an arbitrary broker state consumed by every iterate.
pub fn run_strategy_with_brokers(
    clients: &DensityMatrix,
    brokers: &DensityMatrix,
    cfg: &StrategyConfig,
) -> Result<OutcomeTree> {
    let cfg = cfg.validated()?;
    let start = clients.normalized()?;
    let mut tree = OutcomeTree::default();
    let mut history = Vec::with_capacity(cfg.horizon());
    expand(&start, brokers, cfg.horizon(), &mut history, &mut tree)?;
    Ok(tree)
}

fn expand(
    state: &DensityMatrix,
    brokers: &DensityMatrix,
    horizon: usize,
    history: &mut Vec<IterateOutcome>,
    tree: &mut OutcomeTree,
) -> Result<()> {
    for branch in run_iterate_circuit(state, brokers)? {
        if branch.probability <= tolerances::PRUNE_PROBABILITY {
            continue;
        }
        history.push(branch.outcome);
        let status = classify(history);
        if status.is_terminal() || history.len() >= horizon {
            tree.leaves.push(TreeLeaf {
                history: history.clone(),
                probability: branch.probability,
                final_clients: branch.post_clients.normalized()?,
                status,
            });
        } else {
            expand(&branch.post_clients, brokers, horizon, history, tree)?;
        }
        history.pop();
    }
    Ok(())
}
