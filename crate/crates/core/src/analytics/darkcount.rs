//! False heralds from detector dark counts, for our scheme and the
//! two-photon reference.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optimize::{optimize_theta, Objective};
use crate::error::{Error, Result};
use crate::photonics::{heralded_state_with_dark_counts, ApparatusParams, ExcitationAngle};
use crate::protocol::{parity_projected_target, run_strategy_with_brokers, StrategyConfig};
use crate::qstate::{fidelity, DensityMatrix, Role};
use crate::tolerances;

/// Reference scheme: two herald rounds with true-click probabilities `T/2` and `T`.
fn reference_rounds(t: f64) -> [f64; 2] {
    [t / 2.0, t]
}

fn check_p_dark(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param("p_dark", format!("{p} is outside [0, 1)")))
    }
}

/// Probability that both reference heralds came from real photons.
pub fn reference_fidelity(t: f64, p_dark: f64) -> Result<f64> {
    check_p_dark(p_dark)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::param("T", format!("{t} is outside (0, 1]")));
    }
    Ok(reference_rounds(t)
        .iter()
        .map(|&pr| pr / (pr + 2.0 * p_dark * (1.0 - pr)))
        .product())
}

/// Reference rate including false heralds; `T²/(2τ)` without dark counts.
pub fn reference_rate_with_dark_counts(t: f64, p_dark: f64, tau: f64) -> Result<f64> {
    check_p_dark(p_dark)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::param("T", format!("{t} is outside (0, 1]")));
    }
    let herald = |pr: f64| pr * (1.0 - p_dark) + (1.0 - pr) * 2.0 * p_dark * (1.0 - p_dark);
    Ok(reference_rounds(t)
        .iter()
        .map(|&pr| herald(pr))
        .product::<f64>()
        / tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkCountPerformance {
    /// Mean parity-projection fidelity of successful two-iterate runs.
    pub fidelity: f64,
    pub success_probability: f64,
    pub p_herald: f64,
    pub rate: f64,
}

/// Two-iterate strategy on `|++⟩` clients fed by dark-count-polluted heralds.
pub fn ours_with_dark_counts(
    params: &ApparatusParams,
    theta: ExcitationAngle,
) -> Result<DarkCountPerformance> {
    let params = params.validated()?;
    let herald = heralded_state_with_dark_counts(&params, theta)?;
    let clients = DensityMatrix::all_plus(vec![Role::C1, Role::C2])?;
    let tree =
        run_strategy_with_brokers(&clients, &herald.state, &StrategyConfig::two_iter_only(0))?;
    let mut weighted = 0.0;
    for leaf in tree.leaves.iter().filter(|l| l.status.is_success()) {
        let target = parity_projected_target(&clients, 1 - leaf.history[0].parity())?;
        weighted += leaf.probability * fidelity(&leaf.final_clients, &target)?;
    }
    let success_probability = tree.success_probability();
    if success_probability <= 0.0 {
        return Err(Error::NoClick);
    }
    Ok(DarkCountPerformance {
        fidelity: weighted / success_probability,
        success_probability,
        p_herald: herald.p_herald,
        rate: 0.5 * success_probability * herald.p_herald / params.tau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionClass {
    OursBetter,
    ReferenceBetter,
    /// Neither scheme reaches the fidelity cutoff.
    NoGo,
}

impl RegionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionClass::OursBetter => "ours_better",
            RegionClass::ReferenceBetter => "reference_better",
            RegionClass::NoGo => "no_go",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub t: f64,
    pub p_dark: f64,
    pub theta: f64,
    pub fidelity_ours: f64,
    pub fidelity_reference: f64,
    pub rate_ours: f64,
    pub rate_reference: f64,
    pub class: RegionClass,
}

fn classify_point(f_ours: f64, f_ref: f64, r_ours: f64, r_ref: f64) -> RegionClass {
    let cutoff = 1.0 - tolerances::FIDELITY_CUTOFF;
    match (f_ours >= cutoff, f_ref >= cutoff) {
        (false, false) => RegionClass::NoGo,
        (true, false) => RegionClass::OursBetter,
        (false, true) => RegionClass::ReferenceBetter,
        (true, true) if r_ours > r_ref => RegionClass::OursBetter,
        (true, true) => RegionClass::ReferenceBetter,
    }
}

fn column(t: f64, p_darks: &[f64], tau: f64) -> Result<Vec<RegionPoint>> {
    let base = ApparatusParams {
        tau,
        ..ApparatusParams::symmetric(t)?
    };
    let theta = optimize_theta(&base, Objective::BellRate)?.optimal_theta;
    let angle = ExcitationAngle::new(theta)?;
    p_darks
        .iter()
        .map(|&p_dark| {
            let ours = ours_with_dark_counts(&ApparatusParams { p_dark, ..base }, angle)?;
            let fidelity_reference = reference_fidelity(t, p_dark)?;
            let rate_reference = reference_rate_with_dark_counts(t, p_dark, tau)?;
            Ok(RegionPoint {
                t,
                p_dark,
                theta,
                fidelity_ours: ours.fidelity,
                fidelity_reference,
                rate_ours: ours.rate,
                rate_reference,
                class: classify_point(ours.fidelity, fidelity_reference, ours.rate, rate_reference),
            })
        })
        .collect()
}

/// Classifies every `(T, p_dark)` grid point; output is `T`-major in input order.
///
/// Each `T` uses the dark-free optimal excitation angle.
pub fn dark_count_region(ts: &[f64], p_darks: &[f64], tau: f64) -> Result<Vec<RegionPoint>> {
    #[cfg(feature = "parallel")]
    let columns: Vec<_> = ts.par_iter().map(|&t| column(t, p_darks, tau)).collect();
    #[cfg(not(feature = "parallel"))]
    let columns: Vec<_> = ts.iter().map(|&t| column(t, p_darks, tau)).collect();
    let mut out = Vec::with_capacity(ts.len() * p_darks.len());
    for c in columns {
        out.extend(c?);
    }
    Ok(out)
}
