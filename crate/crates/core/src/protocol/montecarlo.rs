//! Seeded Monte Carlo trajectories of the Bell-pair factory.
//!
//! Trial `n` of a run with seed `s` draws from `ChaCha8Rng::seed_from_u64(s)`
//! on stream `n`, so any trial can be replayed alone and the result never
//! depends on how trials are split across threads. Every accumulated
//! quantity is an integer (fidelities in fixed point), which makes merging
//! exactly associative.

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::iterate::BrokerResource;
use super::run::{parity_projected_target, DistillationRun, RunStatus};
use super::tree::StrategyConfig;
use crate::error::{Error, Result};
use crate::photonics::{
    heralded_state, heralded_state_with_dark_counts, p_click, ApparatusParams, ExcitationAngle,
};
use crate::qstate::{fidelity, DensityMatrix, Role};

/// Fixed-point scale for accumulated fidelities.
const FIDELITY_SCALE: f64 = (1u64 << 52) as f64;

/// Trials per parallel work unit; chunking is by trial index, never by thread.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrialStatus {
    SuccessEven,
    SuccessOdd,
    /// Parity flip: the clients were projected into a separable state.
    Failure,
    /// Undecided at the strategy horizon; counted as a failure for rates.
    Abandoned,
}

impl TrialStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialStatus::SuccessEven => "success_even",
            TrialStatus::SuccessOdd => "success_odd",
            TrialStatus::Failure => "failure",
            TrialStatus::Abandoned => "abandoned",
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, TrialStatus::SuccessEven | TrialStatus::SuccessOdd)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    /// Excitation attempts summed over all iterates of the trial.
    pub attempts: u64,
    pub iterates: u32,
    pub status: TrialStatus,
    /// Bell fidelity of the delivered client pair (successes only).
    pub fidelity: Option<f64>,
    /// Attempts needed for each herald, in order.
    pub attempts_per_herald: Vec<u64>,
}

/// Aggregated trajectory statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n_trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub abandoned: u64,
    pub total_attempts: u64,
    pub sum_attempts_sq: u128,
    pub sum_attempts_on_success: u128,
    /// Histogram of attempts needed per herald.
    pub attempts_per_herald: BTreeMap<u64, u64>,
    /// Histogram of iterates per trial (all outcomes).
    pub iterates_per_run: BTreeMap<u32, u64>,
    /// Histogram of iterates per successful trial.
    pub iterates_per_success: BTreeMap<u32, u64>,
    fidelity_fixed: u128,
}

impl SampleStats {
    pub fn record(&mut self, r: &TrialRecord) {
        self.n_trials += 1;
        match r.status {
            TrialStatus::SuccessEven | TrialStatus::SuccessOdd => self.successes += 1,
            TrialStatus::Failure => self.failures += 1,
            TrialStatus::Abandoned => self.abandoned += 1,
        }
        self.total_attempts += r.attempts;
        self.sum_attempts_sq += (r.attempts as u128) * (r.attempts as u128);
        for &a in &r.attempts_per_herald {
            *self.attempts_per_herald.entry(a).or_default() += 1;
        }
        *self.iterates_per_run.entry(r.iterates).or_default() += 1;
        if r.status.is_success() {
            self.sum_attempts_on_success += r.attempts as u128;
            *self.iterates_per_success.entry(r.iterates).or_default() += 1;
            let f = r.fidelity.unwrap_or(0.0).max(0.0);
            self.fidelity_fixed += (f * FIDELITY_SCALE).round() as u128;
        }
    }

    /// Exact, order-insensitive merge.
    pub fn merge(&mut self, other: &SampleStats) {
        self.n_trials += other.n_trials;
        self.successes += other.successes;
        self.failures += other.failures;
        self.abandoned += other.abandoned;
        self.total_attempts += other.total_attempts;
        self.sum_attempts_sq += other.sum_attempts_sq;
        self.sum_attempts_on_success += other.sum_attempts_on_success;
        self.fidelity_fixed += other.fidelity_fixed;
        for (k, v) in &other.attempts_per_herald {
            *self.attempts_per_herald.entry(*k).or_default() += v;
        }
        for (k, v) in &other.iterates_per_run {
            *self.iterates_per_run.entry(*k).or_default() += v;
        }
        for (k, v) in &other.iterates_per_success {
            *self.iterates_per_success.entry(*k).or_default() += v;
        }
    }

    pub fn success_probability(&self) -> f64 {
        self.successes as f64 / self.n_trials as f64
    }

    pub fn success_probability_se(&self) -> f64 {
        let p = self.success_probability();
        (p * (1.0 - p) / self.n_trials as f64).sqrt()
    }

    /// Simulated time for all trials, `total_attempts × τ`.
    pub fn simulated_time(&self, tau: f64) -> f64 {
        self.total_attempts as f64 * tau
    }

    /// Bell pairs per unit time.
    pub fn rate(&self, tau: f64) -> f64 {
        self.successes as f64 / self.simulated_time(tau)
    }

    /// Delta-method standard error of the ratio estimator [`Self::rate`].
    pub fn rate_se(&self, tau: f64) -> f64 {
        let n = self.n_trials as f64;
        let mean_a = self.total_attempts as f64 / n;
        let r = self.successes as f64 / self.total_attempts as f64;
        // Σ (s − r a)² = S − 2 r Σ a s + r² Σ a²
        let ss = self.successes as f64 - 2.0 * r * self.sum_attempts_on_success as f64
            + r * r * self.sum_attempts_sq as f64;
        let var = ss / (n - 1.0).max(1.0);
        (var / n).sqrt() / mean_a / tau
    }

    /// Mean simulated time per delivered Bell pair.
    pub fn mean_time_per_success(&self, tau: f64) -> f64 {
        self.simulated_time(tau) / self.successes as f64
    }

    pub fn mean_fidelity(&self) -> f64 {
        if self.successes == 0 {
            return f64::NAN;
        }
        self.fidelity_fixed as f64 / FIDELITY_SCALE / self.successes as f64
    }
}

struct TrialModel {
    resource: BrokerResource,
    herald: Geometric,
}

impl TrialModel {
    fn new(params: &ApparatusParams, theta: ExcitationAngle) -> Result<Self> {
        let params = params.validated()?;
        let (resource, p_herald) = if params.p_dark > 0.0 {
            let h = heralded_state_with_dark_counts(&params, theta)?;
            (BrokerResource::Mixed(h.state), h.p_herald)
        } else {
            (
                BrokerResource::Heralded(heralded_state(&params, theta)?),
                p_click(&params, theta),
            )
        };
        let herald = Geometric::new(p_herald.min(1.0))
            .map_err(|e| Error::param("p_herald", e.to_string()))?;
        Ok(Self { resource, herald })
    }
}

fn plus_plus() -> DensityMatrix {
    DensityMatrix::all_plus(vec![Role::C1, Role::C2]).expect("two clients")
}

fn run_one(cfg: &StrategyConfig, model: &TrialModel, trial: u64) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(trial);
    let start = plus_plus();
    let mut run = DistillationRun::new(start.clone())?;
    let mut attempts = 0u64;
    let mut per_herald = Vec::with_capacity(2);
    while !run.status().is_terminal() && run.iterate_count() < cfg.horizon() {
        let a = model.herald.sample(&mut rng) + 1;
        attempts += a;
        per_herald.push(a);
        run.step(&model.resource, &mut rng)?;
    }
    let status = match run.status() {
        RunStatus::SuccessParityEven => TrialStatus::SuccessEven,
        RunStatus::SuccessParityOdd => TrialStatus::SuccessOdd,
        RunStatus::Failure => TrialStatus::Failure,
        RunStatus::Pending => TrialStatus::Abandoned,
    };
    let fidelity = if status.is_success() {
        let parity = 1 - run.history()[0].parity();
        let target = parity_projected_target(&start, parity)?;
        Some(fidelity(run.clients(), &target)?)
    } else {
        None
    };
    Ok(TrialRecord {
        trial,
        attempts,
        iterates: run.iterate_count() as u32,
        status,
        fidelity,
        attempts_per_herald: per_herald,
    })
}

/// Replays a single trial of a seeded run.
pub fn simulate_trial(
    cfg: &StrategyConfig,
    params: &ApparatusParams,
    theta: ExcitationAngle,
    trial: u64,
) -> Result<TrialRecord> {
    let cfg = cfg.validated()?;
    run_one(&cfg, &TrialModel::new(params, theta)?, trial)
}

fn chunk_ranges(n_trials: u64) -> Vec<(u64, u64)> {
    (0..n_trials.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(n_trials)))
        .collect()
}

fn simulate_chunk(
    cfg: &StrategyConfig,
    model: &TrialModel,
    range: (u64, u64),
    keep: bool,
) -> Result<(SampleStats, Vec<TrialRecord>)> {
    let mut stats = SampleStats::default();
    let mut records = Vec::new();
    for trial in range.0..range.1 {
        let r = run_one(cfg, model, trial)?;
        stats.record(&r);
        if keep {
            records.push(r);
        }
    }
    Ok((stats, records))
}

fn simulate(
    cfg: &StrategyConfig,
    params: &ApparatusParams,
    theta: ExcitationAngle,
    n_trials: u64,
    keep: bool,
) -> Result<(SampleStats, Vec<TrialRecord>)> {
    if n_trials == 0 {
        return Err(Error::param("n_trials", "at least one trial is required"));
    }
    let cfg = cfg.validated()?;
    let model = TrialModel::new(params, theta)?;
    let ranges = chunk_ranges(n_trials);
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<(SampleStats, Vec<TrialRecord>)>> = {
        use rayon::prelude::*;
        ranges
            .par_iter()
            .map(|&r| simulate_chunk(&cfg, &model, r, keep))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<(SampleStats, Vec<TrialRecord>)>> = ranges
        .iter()
        .map(|&r| simulate_chunk(&cfg, &model, r, keep))
        .collect();

    let mut stats = SampleStats::default();
    let mut records = Vec::new();
    for part in parts {
        let (s, r) = part?;
        stats.merge(&s);
        records.extend(r);
    }
    Ok((stats, records))
}

/// Runs `n_trials` independent Bell-pair factory trajectories from `|++⟩`.
pub fn run_trajectories(
    cfg: &StrategyConfig,
    params: &ApparatusParams,
    theta: ExcitationAngle,
    n_trials: u64,
) -> Result<SampleStats> {
    simulate(cfg, params, theta, n_trials, false).map(|(s, _)| s)
}

/// As [`run_trajectories`], also returning every per-trial record in trial order.
pub fn run_trajectories_with_records(
    cfg: &StrategyConfig,
    params: &ApparatusParams,
    theta: ExcitationAngle,
    n_trials: u64,
) -> Result<(SampleStats, Vec<TrialRecord>)> {
    simulate(cfg, params, theta, n_trials, true)
}

/// CSV with columns `seed,trial,attempts,iterates,status,fidelity`.
pub fn write_records_csv<W: Write>(seed: u64, records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "seed", "trial", "attempts", "iterates", "status", "fidelity",
    ])?;
    for r in records {
        let fid = r.fidelity.map(|f| f.to_string()).unwrap_or_default();
        w.write_record([
            seed.to_string(),
            r.trial.to_string(),
            r.attempts.to_string(),
            r.iterates.to_string(),
            r.status.as_str().to_string(),
            fid,
        ])?;
    }
    w.flush()?;
    Ok(())
}
