//! Density-matrix simulation of deterministic entanglement purification.
//!
//! A hyperentangled photon pair carries one qubit of polarization and one
//! qubit of discretized energy-time (short/long arm) per photon. The
//! polarization qubits travel through a noisy channel, then a Franson-type
//! interferometer with polarizing beam splitters swaps the clean energy-time
//! entanglement onto polarization. The crate models every stage and the
//! tomography used to characterize the result.
//!
//! Modules:
//! - [`qcore`]: density matrices, channels, partial traces, entanglement measures.
//! - [`optics`]: Jones matrices, rotating-waveplate noise, the photon-pair source.
//! - [`transfer`]: the interferometric transfer, arm blocking and fringe scans.
//! - [`tomo`]: simulated counts, state reconstruction, CHSH and bootstrap errors.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod optics;
pub mod qcore;
pub mod rng;
pub mod tomo;
pub mod transfer;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
