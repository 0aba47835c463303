//! Lattice-path bookkeeping for the loop strategy.
//!
//! Within one parity, a run is a walk on the imbalance between the two
//! signatures; it succeeds when the imbalance returns to zero. `v(k)` counts
//! length-`(k−1)` prefixes (first symbol fixed) that are still alive, split by
//! their imbalance `1, 2, …`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::{eta_weight, p_click, ApparatusParams, ExcitationAngle};
use crate::tolerances;

/// Truncation used when callers do not pick one.
pub const DEFAULT_K_MAX: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceCountVector {
    k: usize,
    v: Vec<u128>,
}

impl SequenceCountVector {
    /// `v(2) = (1, 0, 0, …)`.
    pub fn initial() -> Self {
        Self { k: 2, v: vec![1] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Entry `i` counts prefixes with imbalance `i + 1`.
    pub fn entries(&self) -> &[u128] {
        &self.v
    }

    /// Applies the tridiagonal step `M_{i,j} = δ_{i,j±1}`.
    pub fn next(&self) -> Result<Self> {
        let n = self.v.len();
        let mut w = vec![0u128; n + 1];
        for (i, &c) in self.v.iter().enumerate() {
            if i > 0 {
                w[i - 1] = w[i - 1]
                    .checked_add(c)
                    .ok_or(Error::CountOverflow(self.k + 1))?;
            }
            w[i + 1] = w[i + 1]
                .checked_add(c)
                .ok_or(Error::CountOverflow(self.k + 1))?;
        }
        Ok(Self {
            k: self.k + 1,
            v: w,
        })
    }

    pub fn successes(&self) -> u128 {
        self.v[0]
    }

    pub fn alive(&self) -> Result<u128> {
        self.v
            .iter()
            .try_fold(0u128, |acc, &c| acc.checked_add(c))
            .ok_or(Error::CountOverflow(self.k))
    }
}

pub fn sequence_count_vector(k: usize) -> Result<SequenceCountVector> {
    if k < 2 {
        return Err(Error::param("k", format!("{k} is below 2")));
    }
    let mut v = SequenceCountVector::initial();
    while v.k < k {
        v = v.next()?;
    }
    Ok(v)
}

/// `(N_s(k), N_f(k))`: sequences first balancing at iterate `k`, and prefixes of
/// length `k − 1` that have not balanced yet.
pub fn sequence_counts(k: usize) -> Result<(u128, u128)> {
    let v = sequence_count_vector(k)?;
    Ok((v.successes(), v.alive()?))
}

/// Success and failure probability per iterate count, for a symmetric link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSeries {
    pub eta: f64,
    /// Indexed by `k`; entries 0 and 1 are zero.
    pub p_success: Vec<f64>,
    pub p_failure: Vec<f64>,
    /// Probability that a run is still undecided after `k_max` iterates.
    pub tail_mass: f64,
}

pub fn chain_series(eta: f64, k_max: usize) -> Result<ChainSeries> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", format!("{eta} is outside (0, 1)")));
    }
    if k_max < 2 {
        return Err(Error::param("k_max", format!("{k_max} is below 2")));
    }
    let q = 0.5 * (1.0 - eta);
    let mut p_success = vec![0.0; k_max + 1];
    let mut p_failure = vec![0.0; k_max + 1];
    // u = v(k)·q^{k−1}, kept in floating point so long chains do not overflow
    let mut u = vec![q];
    for k in 2..=k_max {
        p_success[k] = 2.0 * u[0] * q;
        p_failure[k] = 2.0 * eta * u.iter().sum::<f64>() + (1.0 - eta) * eta.powi(k as i32 - 1);
        let mut w = vec![0.0; u.len() + 1];
        for (i, &c) in u.iter().enumerate() {
            if i > 0 {
                w[i - 1] += q * c;
            }
            w[i + 1] += q * c;
        }
        u = w;
    }
    let tail_mass = 2.0 * u.iter().sum::<f64>() + eta.powi(k_max as i32);
    Ok(ChainSeries {
        eta,
        p_success,
        p_failure,
        tail_mass,
    })
}

impl ChainSeries {
    pub fn k_max(&self) -> usize {
        self.p_success.len() - 1
    }

    pub fn p_loop(&self) -> f64 {
        self.p_success.iter().sum()
    }

    /// `Σ k (P_s(k) + P_f(k))` over concluded runs.
    pub fn mean_iterates(&self) -> f64 {
        self.p_success
            .iter()
            .zip(&self.p_failure)
            .enumerate()
            .map(|(k, (s, f))| k as f64 * (s + f))
            .sum()
    }

    /// Bound on the iterate moment carried by undecided runs: the alive mass
    /// shrinks at least by `max(η, 1−η)` per iterate.
    pub fn tail_iterate_bound(&self) -> f64 {
        let r = self.eta.max(1.0 - self.eta);
        self.tail_mass * (self.k_max() as f64 + 1.0 / (1.0 - r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainGrowth {
    /// Net chain growth per unit time; negative when failures dominate.
    pub rate: f64,
    pub eta: f64,
    pub p_loop: f64,
    pub mean_iterates: f64,
    pub tail_mass: f64,
    pub tail_iterate_bound: f64,
    pub converged: bool,
}

/// Growth rate of a linear cluster fed by loop-strategy parity projections.
///
/// Only the mean transmittance of `params` is used; the link is taken as symmetric.
pub fn chain_growth_rate(
    params: &ApparatusParams,
    theta: ExcitationAngle,
    k_max: usize,
) -> Result<ChainGrowth> {
    if k_max < 4 {
        return Err(Error::param("k_max", format!("{k_max} is below 4")));
    }
    let sym = ApparatusParams {
        tau: params.tau,
        ..ApparatusParams::symmetric(params.mean_transmittance())?
    };
    let eta = eta_weight(&sym, theta)?;
    let series = chain_series(eta, k_max)?;
    let p_loop = series.p_loop();
    let mean_iterates = series.mean_iterates();
    let rate = (2.0 * p_loop - (1.0 - p_loop)) * p_click(&sym, theta) / (mean_iterates * sym.tau);
    Ok(ChainGrowth {
        rate,
        eta,
        p_loop,
        mean_iterates,
        tail_mass: series.tail_mass,
        tail_iterate_bound: series.tail_iterate_bound(),
        converged: series.tail_mass <= tolerances::SERIES_TAIL,
    })
}
