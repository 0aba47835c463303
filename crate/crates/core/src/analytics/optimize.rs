use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::chain::chain_growth_rate;
use super::rates::rate_bell;
use crate::error::{Error, Result};
use crate::photonics::{ApparatusParams, ExcitationAngle};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    BellRate,
    ChainRate { k_max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// Objective value at the optimum, per unit time.
    pub rate: f64,
    pub optimal_theta: f64,
    pub params: ApparatusParams,
}

const GRID: usize = 256;
const INVPHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on the open interval `(lo, hi)` by a grid scan followed by
/// golden-section search in the best bracket, until the bracket is below `tol`.
///
/// Returns `(argmax, max)`. Fails when the objective is nowhere positive.
pub fn maximize_scalar<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let h = (hi - lo) / (GRID + 1) as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for n in 1..=GRID {
        let v = f(lo + n as f64 * h)?;
        if v > best.1 {
            best = (n, v);
        }
    }
    if !(best.1 > 0.0 && best.1.is_finite()) {
        return Err(Error::DegenerateObjective);
    }
    let (mut a, mut b) = (lo + (best.0 - 1) as f64 * h, lo + (best.0 + 1) as f64 * h);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Best excitation angle for the chosen figure of merit.
pub fn optimize_theta(params: &ApparatusParams, objective: Objective) -> Result<RateResult> {
    let params = params.validated()?;
    if params.mean_transmittance() * params.cos2_2phi() <= 0.0 {
        return Err(Error::DegenerateObjective);
    }
    let eval = |theta: f64| -> Result<f64> {
        let a = ExcitationAngle::new(theta)?;
        match objective {
            Objective::BellRate => Ok(rate_bell(&params, a)),
            Objective::ChainRate { k_max } => Ok(chain_growth_rate(&params, a, k_max)?.rate),
        }
    };
    let edge = 1e-9;
    let (theta, rate) = maximize_scalar(eval, edge, FRAC_PI_2 - edge, tolerances::THETA_TOLERANCE)?;
    Ok(RateResult {
        rate,
        optimal_theta: theta,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::DEFAULT_K_MAX;

    fn sin2(x: f64) -> f64 {
        x.sin().powi(2)
    }

    #[test]
    fn small_transmittance_gives_one_third() {
        let r = optimize_theta(
            &ApparatusParams::symmetric(1e-5).unwrap(),
            Objective::BellRate,
        )
        .unwrap();
        assert!((sin2(r.optimal_theta) - 1.0 / 3.0).abs() < 1e-3);
        assert!(r.rate > 0.0);
    }

    #[test]
    fn full_transmittance_matches_fine_grid() {
        let g = |th: f64| {
            let s = sin2(th);
            s * (1.0 - s) * (1.0 - s) / (2.0 - s)
        };
        let n = 1_000_000;
        let grid_best = (1..n)
            .map(|k| k as f64 * FRAC_PI_2 / n as f64)
            .max_by(|a, b| g(*a).total_cmp(&g(*b)))
            .unwrap();
        let r = optimize_theta(
            &ApparatusParams::symmetric(1.0).unwrap(),
            Objective::BellRate,
        )
        .unwrap();
        assert!(
            (r.optimal_theta - grid_best).abs() < 2e-6,
            "{} {grid_best}",
            r.optimal_theta
        );
    }

    #[test]
    fn optimum_is_a_local_max() {
        for p in [
            ApparatusParams::symmetric(0.02).unwrap(),
            ApparatusParams {
                t1: 0.3,
                t2: 0.1,
                ..ApparatusParams::symmetric(1.0).unwrap()
            },
        ] {
            for obj in [
                Objective::BellRate,
                Objective::ChainRate {
                    k_max: DEFAULT_K_MAX,
                },
            ] {
                let r = optimize_theta(&p, obj).unwrap();
                for s in [-1e-4, 1e-4] {
                    let th = ExcitationAngle::new(r.optimal_theta + s).unwrap();
                    let v = match obj {
                        Objective::BellRate => rate_bell(&p, th),
                        Objective::ChainRate { k_max } => {
                            chain_growth_rate(&p, th, k_max).unwrap().rate
                        }
                    };
                    assert!(v < r.rate);
                }
            }
        }
    }

    #[test]
    fn degenerate_cases() {
        let lopsided = ApparatusParams {
            t2: 0.0,
            ..ApparatusParams::symmetric(0.5).unwrap()
        };
        assert!(matches!(
            optimize_theta(&lopsided, Objective::BellRate),
            Err(Error::DegenerateObjective)
        ));
        assert!(matches!(
            maximize_scalar(|_| Ok(0.0), 0.0, 1.0, 1e-8),
            Err(Error::DegenerateObjective)
        ));
    }

    #[test]
    fn golden_section_on_peak() {
        let (x, v) = maximize_scalar(
            |x| Ok(1.0 / (1.0 + 1e6 * (x - 0.3141).powi(2))),
            0.0,
            1.0,
            1e-10,
        )
        .unwrap();
        assert!((x - 0.3141).abs() < 1e-9);
        assert!((v - 1.0).abs() < 1e-15);
    }
}
