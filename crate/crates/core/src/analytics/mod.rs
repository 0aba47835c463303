//! Closed-form performance figures for the protocol.

mod chain;
mod darkcount;
mod drift;
mod optimize;
mod rates;
pub mod sweep;

pub use chain::{
    chain_growth_rate, chain_series, sequence_count_vector, sequence_counts, ChainGrowth,
    ChainSeries, SequenceCountVector, DEFAULT_K_MAX,
};
pub use darkcount::{
    dark_count_region, ours_with_dark_counts, reference_fidelity, reference_rate_with_dark_counts,
    DarkCountPerformance, RegionClass, RegionPoint,
};
pub use drift::{
    drift_infidelity_exact, drift_infidelity_physical, drift_infidelity_quadratic, DriftParams,
};
pub use optimize::{maximize_scalar, optimize_theta, Objective, RateResult};
pub use rates::{crossover_t, p_two, rate_bell, two_photon_reference_rate};
