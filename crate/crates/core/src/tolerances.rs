//! Numerical policy shared by every module.

/// Elementwise tolerance for algebraic identities (Hermiticity, trace).
pub const ALGEBRAIC: f64 = 1e-12;

/// Smallest eigenvalue accepted for a positive semidefinite state.
pub const EIGENVALUE: f64 = 1e-10;

/// Traces at or below this value cannot be renormalized.
pub const VANISHING_TRACE: f64 = 1e-14;

/// Exact-tree branches with a smaller probability are dropped.
pub const PRUNE_PROBABILITY: f64 = 1e-15;

/// Tail mass above which a truncated series is reported as unconverged.
pub const SERIES_TAIL: f64 = 1e-9;

/// Target bracket width for the excitation-angle optimizer (radians).
pub const THETA_TOLERANCE: f64 = 1e-8;

/// Minimum acceptable Bell-pair fidelity is `1 - FIDELITY_CUTOFF`.
pub const FIDELITY_CUTOFF: f64 = 1e-3;
