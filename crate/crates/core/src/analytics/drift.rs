use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::ApparatusParams;
use crate::tolerances;

/// Infidelity of a two-iterate success when the asymmetry angles shift by
/// `(δφ, δΔ)` between the two iterates.
pub fn drift_infidelity_exact(phi: f64, delta_phi: f64, delta_delta: f64) -> Result<f64> {
    let a = (2.0 * phi + delta_phi).cos().powi(2);
    let b = delta_phi.sin().powi(2);
    let den = a + b;
    if den <= tolerances::VANISHING_TRACE {
        return Err(Error::DegenerateDrift(den));
    }
    let eps = (a * delta_delta.sin().powi(2) + b * delta_delta.cos().powi(2)) / den;
    Ok(eps.clamp(0.0, 1.0))
}

/// Apparatus drift in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftParams {
    /// Change of the path-length difference, in wavelengths.
    pub d_x: f64,
    /// Relative change of the transmittance ratio.
    pub d_t: f64,
}

impl DriftParams {
    pub fn new(d_x: f64, d_t: f64) -> Result<Self> {
        if !d_x.is_finite() {
            return Err(Error::param("d_x", "must be finite"));
        }
        if d_t.is_nan() || d_t >= 1.0 {
            return Err(Error::param("d_t", format!("{d_t} must be below 1")));
        }
        Ok(Self { d_x, d_t })
    }

    /// Drift between the apparatus of the first and of the second iterate.
    pub fn from_apparatus(before: &ApparatusParams, after: &ApparatusParams) -> Result<Self> {
        let (before, after) = (before.validated()?, after.validated()?);
        if (before.lambda - after.lambda).abs() > tolerances::ALGEBRAIC * before.lambda {
            return Err(Error::param("lambda", "wavelength must not drift"));
        }
        if [before.t1, before.t2, after.t1, after.t2]
            .iter()
            .any(|&t| t <= 0.0)
        {
            return Err(Error::param("t1/t2", "drift needs nonzero transmittances"));
        }
        let d_x = ((before.x1 - before.x2) - (after.x1 - after.x2)) / before.lambda;
        let d_t = 1.0 - (after.t1 * before.t2 / (after.t2 * before.t1)).sqrt();
        Self::new(d_x, d_t)
    }

    /// Angle shifts `(δφ, δΔ)` for an apparatus starting at asymmetry `phi`.
    pub fn angles(&self, phi: f64) -> (f64, f64) {
        let t = (phi + FRAC_PI_4).tan() * (1.0 - self.d_t);
        (t.atan() - FRAC_PI_4 - phi, -PI * self.d_x)
    }
}

/// Exact infidelity in drift variables; independent of the starting asymmetry.
pub fn drift_infidelity_physical(d: &DriftParams) -> f64 {
    let r = (d.d_t / (2.0 - d.d_t)).powi(2);
    let (s, c) = (PI * d.d_x).sin_cos();
    (s * s + c * c * r) / (1.0 + r)
}

/// Leading-order expansion `(π D_x)² + (D_T/2)²`.
pub fn drift_infidelity_quadratic(d: &DriftParams) -> f64 {
    (PI * d.d_x).powi(2) + (d.d_t / 2.0).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn no_drift_no_error() {
        let d = DriftParams::new(0.0, 0.0).unwrap();
        assert_eq!(drift_infidelity_physical(&d), 0.0);
        assert_eq!(drift_infidelity_exact(0.3, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn path_length_budget() {
        let d = DriftParams::new(1.0 / (32.0 * PI), 0.0).unwrap();
        let eps = drift_infidelity_physical(&d);
        assert_abs_diff_eq!(eps, (1.0f64 / 32.0).sin().powi(2), epsilon = 1e-15);
        assert!(eps < 1e-3);
    }

    #[test]
    fn degenerate_denominator_is_flagged() {
        assert!(matches!(
            drift_infidelity_exact(FRAC_PI_4, 0.0, 0.2),
            Err(Error::DegenerateDrift(_))
        ));
    }

    #[test]
    fn quadratic_residual() {
        // sin² contributes −(πD_x)⁴/3; the transmittance ratio contributes +D_T³/4
        for a in 0..=20 {
            for b in 0..=20 {
                let d = DriftParams::new(a as f64 * 0.005, b as f64 * 0.005).unwrap();
                let m = d.d_x.max(d.d_t);
                let gap = (drift_infidelity_physical(&d) - drift_infidelity_quadratic(&d)).abs();
                assert!(
                    gap <= d.d_t.powi(3) / 4.0 + 40.0 * m.powi(4) + 1e-18,
                    "{d:?} {gap}"
                );
            }
        }
        let d = DriftParams::new(0.0, 0.01).unwrap();
        let gap = drift_infidelity_physical(&d) - drift_infidelity_quadratic(&d);
        assert!((gap / 0.01f64.powi(3) - 0.25).abs() < 0.01);
        let d = DriftParams::new(0.01, 0.0).unwrap();
        let gap = drift_infidelity_quadratic(&d) - drift_infidelity_physical(&d);
        assert!((gap / (PI * 0.01).powi(4) - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn apparatus_mapping() {
        let before = ApparatusParams {
            x1: 0.4,
            x2: 0.1,
            lambda: 2.0,
            ..ApparatusParams::symmetric(0.2).unwrap()
        };
        let after = ApparatusParams {
            t1: 0.25,
            x1: 0.45,
            ..before
        };
        let d = DriftParams::from_apparatus(&before, &after).unwrap();
        assert_abs_diff_eq!(d.d_x, -0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(d.d_t, 1.0 - 1.25f64.sqrt(), epsilon = 1e-15);
        let (dphi, ddelta) = d.angles(before.phi());
        assert_abs_diff_eq!(before.phi() + dphi, after.phi(), epsilon = 1e-14);
        assert_abs_diff_eq!(ddelta, PI * 0.05 / 2.0, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn physical_form_matches_exact(
            t1 in 0.01f64..1.0, t2 in 0.01f64..1.0, t1b in 0.01f64..1.0, t2b in 0.01f64..1.0,
            x in -0.3f64..0.3, xb in -0.3f64..0.3,
        ) {
            let before = ApparatusParams { t1, t2, x1: x, ..ApparatusParams::symmetric(0.5).unwrap() };
            let after = ApparatusParams { t1: t1b, t2: t2b, x1: xb, ..before };
            let d = DriftParams::from_apparatus(&before, &after).unwrap();
            let (dphi, ddelta) = d.angles(before.phi());
            let exact = drift_infidelity_exact(before.phi(), dphi, ddelta).unwrap();
            prop_assert!((exact - drift_infidelity_physical(&d)).abs() < 1e-12);
        }

        #[test]
        fn symmetric_in_path_drift(dx in -0.5f64..0.5, dt in -2.0f64..0.99) {
            let e = drift_infidelity_physical(&DriftParams::new(dx, dt).unwrap());
            let m = drift_infidelity_physical(&DriftParams::new(-dx, dt).unwrap());
            prop_assert!((0.0..=1.0).contains(&e));
            prop_assert!((e - m).abs() < 1e-15);
        }

        #[test]
        fn exact_in_unit_interval(phi in -0.78f64..0.78, dphi in -0.5f64..0.5, dd in -3.0f64..3.0) {
            let e = drift_infidelity_exact(phi, dphi, dd).unwrap();
            prop_assert!((0.0..=1.0).contains(&e));
            let m = drift_infidelity_exact(phi, dphi, -dd).unwrap();
            prop_assert!((e - m).abs() < 1e-15);
        }
    }
}
