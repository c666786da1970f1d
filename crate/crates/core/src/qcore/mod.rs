//! Density matrices over small qubit registers.

mod channel;
mod density;
pub mod dump;
mod layout;
pub mod linalg;
mod measures;
mod ops;
pub mod states;

pub use channel::QuantumChannel;
pub use density::{DensityMatrix, HERMITIAN_TOL, MAX_DIM, PSD_TOL, TRACE_TOL};
pub use layout::{SubsystemLayout, ET_A, ET_B, H, L, POL_A, POL_B, S, V};
pub use measures::{concurrence, fidelity_to, purity, trace_distance};
pub use ops::{apply_channel, apply_unitary, embed, partial_trace, permute, tensor, tensor_with_limit, EMPTY_TRACE};
pub use states::{random_state, RandomKind};

mod pair;
pub use pair::{PhotonPairState, Photon};
