//! Optical elements, noisy polarization channels and the photon-pair source.

mod jones;
mod noise;
mod pbs;
mod source;

pub use jones::{jones, WaveplateKind, WaveplateSpec};
pub use noise::{apply_noisy_channel, rotating_plate_channel, NoiseStage, NoisyChannelSpec, DEFAULT_PLATE_STEPS};
pub use pbs::{pbs_cnot, LocalGate};
pub use source::{energy_time_state, make_source_state, polarization_state, PolInput, SourceConfig, MEASURED_FRANSON_VISIBILITY};
