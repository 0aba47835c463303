//! Optical link model: loss, path-length asymmetry, excitation and clicks.
//!
//! Each broker is prepared in `cos θ|0⟩ + sin θ|e⟩`; `|e⟩` decays to `|1⟩`
//! emitting a photon that survives its arm with transmittance `T1` or `T2`
//! before a 50:50 beam splitter erases which-path information. Detectors
//! are not number resolving, and two captured photons bunch onto the same
//! detector, so "one detector active" is the herald.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{apply_one_qubit, DensityMatrix, Role, SingleQubitOperator, C64};

/// Physical description of the two-arm optical link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApparatusParams {
    /// Transmittance of arm 1 (broker B1).
    pub t1: f64,
    /// Transmittance of arm 2 (broker B2).
    pub t2: f64,
    #[serde(default)]
    pub x1: f64,
    #[serde(default)]
    pub x2: f64,
    /// Wavelength, in the same unit as `x1`, `x2`.
    #[serde(default = "default_one")]
    pub lambda: f64,
    /// False-click probability per detector per attempt window.
    #[serde(default)]
    pub p_dark: f64,
    /// Duration of one excitation attempt.
    #[serde(default = "default_one")]
    pub tau: f64,
}

fn default_one() -> f64 {
    1.0
}

impl ApparatusParams {
    /// Symmetric, dark-count-free link with capture probability `t` in both arms.
    pub fn symmetric(t: f64) -> Result<Self> {
        Self {
            t1: t,
            t2: t,
            x1: 0.0,
            x2: 0.0,
            lambda: 1.0,
            p_dark: 0.0,
            tau: 1.0,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} is outside [0, 1]")))
            }
        };
        unit("t1", self.t1)?;
        unit("t2", self.t2)?;
        if self.t1 + self.t2 <= 0.0 {
            return Err(Error::param("t1 + t2", "must be positive"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param(
                "lambda",
                format!("{} must be positive", self.lambda),
            ));
        }
        if !(0.0..1.0).contains(&self.p_dark) {
            return Err(Error::param(
                "p_dark",
                format!("{} is outside [0, 1)", self.p_dark),
            ));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::param(
                "tau",
                format!("{} must be positive", self.tau),
            ));
        }
        if !(self.x1.is_finite() && self.x2.is_finite()) {
            return Err(Error::param("x1/x2", "path lengths must be finite"));
        }
        Ok(self)
    }

    /// Mean transmittance `(T1 + T2)/2`.
    pub fn mean_transmittance(&self) -> f64 {
        0.5 * (self.t1 + self.t2)
    }

    /// Transmittance asymmetry φ ∈ [−π/4, π/4] with `sin 2φ = (T1 − T2)/(T1 + T2)`.
    pub fn phi(&self) -> f64 {
        let s = ((self.t1 - self.t2) / (self.t1 + self.t2)).clamp(-1.0, 1.0);
        0.5 * s.asin()
    }

    /// Path-length asymmetry `π(x1 − x2)/λ`, reduced into (−π/2, π/2].
    pub fn delta(&self) -> f64 {
        reduce_delta(PI * (self.x1 - self.x2) / self.lambda)
    }

    /// `cos²(2φ) = T1 T2 / T²`.
    pub fn cos2_2phi(&self) -> f64 {
        let sum = self.t1 + self.t2;
        4.0 * self.t1 * self.t2 / (sum * sum)
    }

    pub fn from_config_str(s: &str) -> Result<Self> {
        let params: Self = toml::from_str(s).map_err(|e| Error::Config(e.message().to_string()))?;
        params.validated()
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    /// Flat `key = value` listing readable by [`Self::from_config_str`].
    pub fn to_config_string(&self) -> String {
        format!(
            "t1 = {:?}\nt2 = {:?}\nx1 = {:?}\nx2 = {:?}\nlambda = {:?}\np_dark = {:?}\ntau = {:?}\n",
            self.t1, self.t2, self.x1, self.x2, self.lambda, self.p_dark, self.tau
        )
    }
}

/// Reduce an angle modulo π into (−π/2, π/2].
pub fn reduce_delta(delta: f64) -> f64 {
    let mut d = delta.rem_euclid(PI);
    if d > FRAC_PI_2 {
        d -= PI;
    }
    d
}

/// Broker preparation angle θ ∈ [0, π/2].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ExcitationAngle(f64);

impl ExcitationAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if (0.0..=FRAC_PI_2).contains(&theta) {
            Ok(Self(theta))
        } else {
            Err(Error::param(
                "theta",
                format!("{theta} is outside [0, π/2]"),
            ))
        }
    }

    /// Angle with the given excited-state population `sin²θ`.
    pub fn from_sin2(sin2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sin2) {
            return Err(Error::param("sin²θ", format!("{sin2} is outside [0, 1]")));
        }
        Self::new(sin2.sqrt().asin())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin2(self) -> f64 {
        let s = self.0.sin();
        s * s
    }
}

/// Which of the two detectors registered the herald.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Detector {
    #[default]
    D0,
    D1,
}

/// Post-click broker state `(1−η) Z^{φ,Δ}|Ψ+⟩⟨Ψ+|Z^{φ,Δ}† + η|11⟩⟨11|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeraldedPair {
    pub eta: f64,
    pub phi: f64,
    pub delta: f64,
    pub detector: Detector,
}

impl HeraldedPair {
    pub fn new(eta: f64, phi: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::param("eta", format!("{eta} is outside [0, 1]")));
        }
        Ok(Self {
            eta,
            phi,
            delta,
            detector: Detector::D0,
        })
    }

    pub fn with_detector(mut self, detector: Detector) -> Self {
        self.detector = detector;
        self
    }

    /// Expansion over `[B1, B2]`.
    ///
    /// A click on `D1` heralds `|01⟩ − |10⟩`; the local Z on B1 that maps it back to
    /// `|Ψ+⟩` is applied here, so the result is detector independent.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sign = match self.detector {
            Detector::D0 => 1.0,
            Detector::D1 => -1.0,
        };
        let roles = vec![Role::B1, Role::B2];
        let zero = C64::new(0.0, 0.0);
        let raw = DensityMatrix::from_pure(
            roles.clone(),
            &[zero, C64::new(h, 0.0), C64::new(sign * h, 0.0), zero],
        )
        .expect("two-qubit register");
        let raw = if sign < 0.0 {
            apply_one_qubit(&raw, &SingleQubitOperator::pauli_z(), Role::B1, false)
                .expect("B1 present")
        } else {
            raw
        };
        let bell = apply_one_qubit(
            &raw,
            &SingleQubitOperator::zasym(self.phi, self.delta),
            Role::B1,
            false,
        )
        .expect("B1 present");
        let one_one = DensityMatrix::basis(roles, 3).expect("two-qubit register");
        bell.scaled(1.0 - self.eta)
            .plus(&one_one.scaled(self.eta))
            .expect("same register")
    }
}

/// Probability that exactly one detector clicks (no dark counts).
pub fn p_click(params: &ApparatusParams, theta: ExcitationAngle) -> f64 {
    let t = params.mean_transmittance();
    let s2 = theta.sin2();
    t * s2 * (2.0 - t * s2 * params.cos2_2phi())
}

/// Weight η of the `|11⟩⟨11|` contamination in the heralded state.
pub fn eta_weight(params: &ApparatusParams, theta: ExcitationAngle) -> Result<f64> {
    let t = params.mean_transmittance();
    let s2 = theta.sin2();
    let c2 = params.cos2_2phi();
    let denom = 2.0 - t * s2 * c2;
    if p_click(params, theta) <= 0.0 {
        return Err(Error::NoClick);
    }
    Ok(s2 * (2.0 - t * c2) / denom)
}

pub fn heralded_state(params: &ApparatusParams, theta: ExcitationAngle) -> Result<HeraldedPair> {
    let eta = eta_weight(params, theta)?;
    HeraldedPair::new(eta.clamp(0.0, 1.0), params.phi(), params.delta())
}

/// Broker state conditioned on no photon reaching either detector.
///
/// Lost photons leave orthogonal records in the environment, so the state is
/// diagonal: `|00⟩` (no emission), `|01⟩`/`|10⟩` (one emission, lost) and
/// `|11⟩` (both emitted, both lost).
pub fn no_detection_state(
    params: &ApparatusParams,
    theta: ExcitationAngle,
) -> Result<DensityMatrix> {
    let s2 = theta.sin2();
    let c2 = 1.0 - s2;
    // basis order |B1 B2⟩: 00, 01, 10, 11; B1 emitting is tied to arm 1
    let weights = [
        c2 * c2,
        c2 * s2 * (1.0 - params.t2),
        s2 * c2 * (1.0 - params.t1),
        s2 * s2 * (1.0 - params.t1) * (1.0 - params.t2),
    ];
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::VanishingTrace(total));
    }
    let m = DMatrix::from_fn(4, 4, |r, c| {
        if r == c {
            C64::new(weights[r] / total, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DensityMatrix::new(vec![Role::B1, Role::B2], m)
}

/// Broker state and herald probability when detectors also fire falsely.
#[derive(Debug, Clone)]
pub struct DarkCountHerald {
    pub state: DensityMatrix,
    pub p_herald: f64,
    /// Probability that a herald was caused by a real photon.
    pub genuine_fraction: f64,
}

/// Herald = exactly one of the two detectors active, real or dark.
///
/// A real click survives when the other detector stays dark; with no real
/// detection, exactly one of the two detectors must fire falsely.
pub fn heralded_state_with_dark_counts(
    params: &ApparatusParams,
    theta: ExcitationAngle,
) -> Result<DarkCountHerald> {
    let p = params.p_dark;
    let pc = p_click(params, theta);
    let w_true = pc * (1.0 - p);
    let w_false = (1.0 - pc) * 2.0 * p * (1.0 - p);
    let p_herald = w_true + w_false;
    if p_herald <= 0.0 {
        return Err(Error::NoClick);
    }
    let mut state: Option<DensityMatrix> = None;
    if w_true > 0.0 {
        let s = heralded_state(params, theta)?
            .to_density_matrix()
            .scaled(w_true / p_herald);
        state = Some(s);
    }
    if w_false > 0.0 {
        let s = no_detection_state(params, theta)?.scaled(w_false / p_herald);
        state = Some(match state {
            Some(t) => t.plus(&s)?,
            None => s,
        });
    }
    Ok(DarkCountHerald {
        state: state.expect("at least one herald channel has weight"),
        p_herald,
        genuine_fraction: w_true / p_herald,
    })
}
