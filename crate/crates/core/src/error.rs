use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSelection(String),

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("postselection removed the whole state (retained probability {probability:.3e})")]
    EmptyPostselection { probability: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("measurement settings do not span the operator space (rank {rank} of {required})")]
    RankDeficient { rank: usize, required: usize },

    #[error("invalid count data: {0}")]
    InvalidData(String),

    #[error("too many failed bootstrap resamples: {failed} of {total}")]
    BootstrapFailure { failed: usize, total: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}
