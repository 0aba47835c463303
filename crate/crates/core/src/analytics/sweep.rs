//! Parameter sweeps and their CSV layouts.
//!
//! | sweep      | columns                                                                 |
//! |------------|-------------------------------------------------------------------------|
//! | rates      | `T,theta_opt,R_ours,R_reference,ratio,note`                              |
//! | drift      | `D_x,D_T,epsilon_exact,epsilon_quadratic,fidelity,fidelity_raw`          |
//! | darkcounts | `T,p_dark,theta,fidelity_ours,fidelity_reference,rate_ours,rate_reference,class` |
//!
//! Rows follow parameter order. Floats use Rust's shortest round-trip formatting.

use std::io::Write;

use super::darkcount::RegionPoint;
use super::drift::{drift_infidelity_physical, drift_infidelity_quadratic, DriftParams};
use super::optimize::{optimize_theta, Objective};
use super::rates::{crossover_t, two_photon_reference_rate};
use crate::error::{Error, Result};
use crate::photonics::ApparatusParams;
use crate::tolerances;

pub const RATES_HEADER: [&str; 6] = ["T", "theta_opt", "R_ours", "R_reference", "ratio", "note"];
pub const DRIFT_HEADER: [&str; 6] = [
    "D_x",
    "D_T",
    "epsilon_exact",
    "epsilon_quadratic",
    "fidelity",
    "fidelity_raw",
];
pub const DARKCOUNT_HEADER: [&str; 8] = [
    "T",
    "p_dark",
    "theta",
    "fidelity_ours",
    "fidelity_reference",
    "rate_ours",
    "rate_reference",
    "class",
];

/// `points` values from `lo` to `hi`, evenly spaced in log scale.
pub fn log_space(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || points == 0 {
        return Err(Error::param(
            "range",
            format!("[{lo}, {hi}] with {points} points is empty"),
        ));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|n| match n {
            0 => lo,
            n if n == points - 1 => hi,
            n => (a + (b - a) * n as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

/// `points` values from `lo` to `hi` inclusive, evenly spaced.
pub fn lin_space(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(hi >= lo && lo.is_finite() && hi.is_finite()) || points == 0 {
        return Err(Error::param(
            "range",
            format!("[{lo}, {hi}] with {points} points is empty"),
        ));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points)
        .map(|n| lo + (hi - lo) * n as f64 / (points - 1) as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub t: f64,
    pub theta_opt: f64,
    pub rate_ours: f64,
    pub rate_reference: f64,
    pub note: &'static str,
}

impl RateRow {
    pub fn ratio(&self) -> f64 {
        self.rate_ours / self.rate_reference
    }
}

fn rate_row(t: f64, base: &ApparatusParams, note: &'static str) -> Result<RateRow> {
    let params = ApparatusParams {
        t1: t,
        t2: t,
        ..*base
    }
    .validated()?;
    let best = optimize_theta(&params, Objective::BellRate)?;
    Ok(RateRow {
        t,
        theta_opt: best.optimal_theta,
        rate_ours: best.rate,
        rate_reference: two_photon_reference_rate(t, params.tau)?,
        note,
    })
}

/// Optimal Bell-pair rate against the reference for each `T`, symmetric link.
///
/// A row at the crossover is inserted, in order, when it falls inside the range.
pub fn rate_sweep(ts: &[f64], tau: f64) -> Result<Vec<RateRow>> {
    let base = ApparatusParams {
        tau,
        ..ApparatusParams::symmetric(1.0)?
    };
    let mut rows = ts
        .iter()
        .map(|&t| rate_row(t, &base, ""))
        .collect::<Result<Vec<_>>>()?;
    let tstar = crossover_t();
    let (lo, hi) = ts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &t| {
            (l.min(t), h.max(t))
        });
    if ts.len() > 1 && lo <= tstar && tstar <= hi {
        let at = rows.iter().position(|r| r.t > tstar).unwrap_or(rows.len());
        rows.insert(at, rate_row(tstar, &base, "crossover")?);
    }
    Ok(rows)
}

pub fn write_rates_csv<W: Write>(rows: &[RateRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(RATES_HEADER)?;
    for r in rows {
        w.write_record(&[
            r.t.to_string(),
            r.theta_opt.to_string(),
            r.rate_ours.to_string(),
            r.rate_reference.to_string(),
            r.ratio().to_string(),
            r.note.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftRow {
    pub drift: DriftParams,
    pub epsilon_exact: f64,
    pub epsilon_quadratic: f64,
}

impl DriftRow {
    pub fn fidelity_raw(&self) -> f64 {
        1.0 - self.epsilon_exact
    }

    /// Fidelity, or `None` below the display cutoff when `clip` is set.
    pub fn fidelity(&self, clip: bool) -> Option<f64> {
        let f = self.fidelity_raw();
        (!clip || f >= 1.0 - tolerances::FIDELITY_CUTOFF).then_some(f)
    }
}

/// Drift error on the grid `d_xs × d_ts`, `D_x` major.
pub fn drift_grid(d_xs: &[f64], d_ts: &[f64]) -> Result<Vec<DriftRow>> {
    let mut rows = Vec::with_capacity(d_xs.len() * d_ts.len());
    for &d_x in d_xs {
        for &d_t in d_ts {
            let drift = DriftParams::new(d_x, d_t)?;
            rows.push(DriftRow {
                drift,
                epsilon_exact: drift_infidelity_physical(&drift),
                epsilon_quadratic: drift_infidelity_quadratic(&drift),
            });
        }
    }
    Ok(rows)
}

/// Clipped fidelities below the cutoff are written as empty fields.
pub fn write_drift_csv<W: Write>(rows: &[DriftRow], clip: bool, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(DRIFT_HEADER)?;
    for r in rows {
        w.write_record(&[
            r.drift.d_x.to_string(),
            r.drift.d_t.to_string(),
            r.epsilon_exact.to_string(),
            r.epsilon_quadratic.to_string(),
            r.fidelity(clip).map(|f| f.to_string()).unwrap_or_default(),
            r.fidelity_raw().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_region_csv<W: Write>(points: &[RegionPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(DARKCOUNT_HEADER)?;
    for p in points {
        w.write_record(&[
            p.t.to_string(),
            p.p_dark.to_string(),
            p.theta.to_string(),
            p.fidelity_ours.to_string(),
            p.fidelity_reference.to_string(),
            p.rate_ours.to_string(),
            p.rate_reference.to_string(),
            p.class.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing() {
        let v = log_space(1e-5, 1.0, 6).unwrap();
        assert_eq!(v[0], 1e-5);
        assert_eq!(v[5], 1.0);
        assert!((v[2] - 1e-3).abs() < 1e-15);
        assert_eq!(log_space(0.2, 0.9, 1).unwrap(), vec![0.2]);
        assert!(log_space(1.0, 0.1, 5).is_err());
        assert!(log_space(0.0, 0.1, 5).is_err());
        assert!(lin_space(0.0, 1.0, 0).is_err());
        assert_eq!(lin_space(0.0, 0.1, 3).unwrap(), vec![0.0, 0.05, 0.1]);
    }

    #[test]
    fn rates_csv_has_crossover_row() {
        let rows = rate_sweep(&log_space(1e-4, 1.0, 9).unwrap(), 1.0).unwrap();
        assert_eq!(rows.len(), 10);
        let cross = rows.iter().find(|r| r.note == "crossover").unwrap();
        assert!(rows.windows(2).all(|w| w[0].t < w[1].t));
        // the optimal angle beats 1/3 slightly at finite T, so the ratio is just above 1
        assert!((cross.ratio() - 1.0).abs() < 1e-2, "{}", cross.ratio());
        assert!(
            (rows[0].ratio() - 1481.0).abs() < 5.0,
            "{}",
            rows[0].ratio()
        );
        let mut buf = Vec::new();
        write_rates_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("T,theta_opt,R_ours,R_reference,ratio,note\n"));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 11);
    }

    #[test]
    fn drift_clip() {
        let rows = drift_grid(&[0.0, 0.05], &[0.0]).unwrap();
        let mut buf = Vec::new();
        write_drift_csv(&rows, true, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last = text.lines().last().unwrap();
        let fields: Vec<_> = last.split(',').collect();
        assert_eq!(fields[4], "");
        assert!(fields[5].parse::<f64>().unwrap() < 0.99);
        assert_eq!(text.lines().nth(1).unwrap().split(',').nth(4), Some("1"));
    }
}
