//! Simulated polarization tomography and the figures of merit derived from it.

mod bootstrap;
mod chsh;
mod counts;
mod recon;
mod settings;

pub use bootstrap::{metrics_of, DEFAULT_MC_SAMPLES, MIN_MC_SAMPLES, monte_carlo_metrics, BootstrapOptions, Estimate, MetricsReport, PointMetrics, Resampling};
pub use chsh::{chsh_value, correlation, linear_pauli, ChshAngles};
pub use counts::{counts_from_probabilities, setting_probabilities, simulate_counts, CountData, COINCIDENCE_RATE_CPS, DEFAULT_PAIRS_PER_SETTING, INTEGRATION_TIME_S};
pub use recon::{
    linear_inversion, linear_inversion_from, mle_reconstruct, mle_reconstruct_from, mle_reconstruct_observed, reconstruct, MleOptions, Method,
    Observations, ReconstructionResult, PROBABILITY_FLOOR,
};
pub use settings::{projector, standard_settings, Eigenstate, MeasurementSetting, PartySetting};
