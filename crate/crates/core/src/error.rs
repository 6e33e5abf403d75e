use thiserror::Error;

/// Errors raised by the physics and numerics layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("custom locking rate {value} outside admissible interval [{lower}, {upper}] rad/us")]
    LockOutOfRange { value: f64, lower: f64, upper: f64 },

    #[error("separation must be positive, got r = {0} um")]
    NonPositiveSeparation(f64),

    #[error("steady state is not unique (null space dimension {dimension}, singular values {smallest:e} / {second:e})")]
    DegenerateSteadyState {
        dimension: usize,
        smallest: f64,
        second: f64,
    },

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("profile contains non-finite values at index {0}")]
    NonFiniteProfile(usize),

    #[error("target loss {target:e} /us unreachable: bracket omega1 [{lower:e}, {upper:e}] rad/us gives loss [{loss_lower:e}, {loss_upper:e}] /us")]
    CalibrationOutOfRange {
        target: f64,
        lower: f64,
        upper: f64,
        loss_lower: f64,
        loss_upper: f64,
    },

    #[error("loss is not monotone in omega1 near {omega1:e} rad/us")]
    NonMonotoneLoss { omega1: f64 },

    #[error("kernel table covers r <= {table:e} um but the grid needs {needed:e} um")]
    KernelTooShort { table: f64, needed: f64 },

    #[error("kernel tail does not decay: |U(r_max)| / max|U| = {0:e}")]
    KernelTailNotDecayed(f64),

    #[error("field mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite field at step {step}")]
    Diverged { step: usize },

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
