use crate::error::{Error, Result};
use crate::photonics::{ApparatusParams, ExcitationAngle};

/// Probability that the two-iterate strategy succeeds, `cos²(2φ)(1−η)²/2`.
pub fn p_two(eta: f64, phi: f64) -> f64 {
    let c = (2.0 * phi).cos();
    c * c * (1.0 - eta) * (1.0 - eta) / 2.0
}

/// Bell pairs per unit time for the two-iterate strategy, `½ P_two P_click / τ`.
pub fn rate_bell(params: &ApparatusParams, theta: ExcitationAngle) -> f64 {
    let t = params.mean_transmittance();
    let c2 = params.cos2_2phi();
    let s2 = theta.sin2();
    let cos2 = 1.0 - s2;
    t * c2 * s2 * cos2 * cos2 / (2.0 - t * s2 * c2) / params.tau
}

/// Rate of the two-photon reference scheme, `T²/(2τ)`.
///
/// Calibrated so that it meets [`rate_bell`] at `sin²θ = 1/3` exactly at [`crossover_t`].
pub fn two_photon_reference_rate(t: f64, tau: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::param("T", format!("{t} is outside (0, 1]")));
    }
    Ok(t * t / (2.0 * tau))
}

/// Capture probability above which the reference scheme is faster: the root of
/// `T² − 6T + 8/9 = 0` in (0, 1).
pub fn crossover_t() -> f64 {
    3.0 - 73f64.sqrt() / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::{eta_weight, p_click};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn third() -> ExcitationAngle {
        ExcitationAngle::from_sin2(1.0 / 3.0).unwrap()
    }

    #[test]
    fn rate_limits() {
        let p = ApparatusParams::symmetric(0.3).unwrap();
        assert_eq!(rate_bell(&p, ExcitationAngle::new(0.0).unwrap()), 0.0);
        assert!(
            rate_bell(
                &p,
                ExcitationAngle::new(std::f64::consts::FRAC_PI_2).unwrap()
            )
            .abs()
                < 1e-30
        );
        let lopsided = ApparatusParams {
            t1: 0.6,
            t2: 0.0,
            ..p
        };
        assert!(rate_bell(&lopsided, ExcitationAngle::new(0.7).unwrap()).abs() < 1e-16);
        let t = 1e-9;
        let small = ApparatusParams::symmetric(t).unwrap();
        assert_abs_diff_eq!(rate_bell(&small, third()) / t, 4.0 / 54.0, epsilon = 1e-9);
    }

    #[test]
    fn crossover_and_reference() {
        let t = crossover_t();
        assert_abs_diff_eq!(t * t - 6.0 * t + 8.0 / 9.0, 0.0, epsilon = 1e-14);
        let ours = rate_bell(&ApparatusParams::symmetric(t).unwrap(), third());
        assert_abs_diff_eq!(
            ours,
            two_photon_reference_rate(t, 1.0).unwrap(),
            epsilon = 1e-15
        );
        assert_eq!(two_photon_reference_rate(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(two_photon_reference_rate(1.0, 4.0).unwrap(), 0.125);
        assert!(two_photon_reference_rate(0.0, 1.0).is_err());
        assert!(two_photon_reference_rate(1.1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn rate_is_half_p_two_times_click(
            t1 in 0.0f64..=1.0, t2 in 0.001f64..=1.0, th in 0.01f64..1.56, tau in 0.1f64..10.0,
        ) {
            let p = ApparatusParams { tau, ..ApparatusParams::symmetric(0.5).unwrap() };
            let p = ApparatusParams { t1, t2, ..p };
            let a = ExcitationAngle::new(th).unwrap();
            let eta = eta_weight(&p, a).unwrap();
            let via_parts = 0.5 * p_two(eta, p.phi()) * p_click(&p, a) / tau;
            let r = rate_bell(&p, a);
            prop_assert!((r - via_parts).abs() <= 1e-14 * r.abs().max(1.0));
            prop_assert!(r >= 0.0);
        }
    }
}
