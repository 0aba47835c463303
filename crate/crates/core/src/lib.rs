//! Heralded entanglement distillation between remote matter qubits under
//! heavy photon loss.
//!
//! A lone detector click leaves two optically active "broker" qubits in a
//! noisy, asymmetric Bell state. Consuming two or more of these resources
//! through local rotations, controlled-Z gates and X measurements applies a
//! perfect parity projection to a pair of long-lived "client" qubits, with
//! a success rate that degrades only linearly in the photon capture
//! probability.
//!
//! The crate is split into:
//!
//! * [`qstate`]: a small dense density-matrix engine keyed by qubit role.
//! * [`photonics`]: apparatus parameters, click statistics and the heralded
//!   broker state (optionally contaminated by detector dark counts).
//! * [`protocol`]: the distillation iterate, outcome classification, exact
//!   outcome trees and seeded Monte Carlo trajectories.
//! * [`analytics`]: closed-form rates, drift infidelity, the chain-growth
//!   series and the comparison against a two-photon reference scheme.

pub mod analytics;
pub mod error;
pub mod photonics;
pub mod protocol;
pub mod qstate;
pub mod tolerances;

pub use error::{Error, Result};
