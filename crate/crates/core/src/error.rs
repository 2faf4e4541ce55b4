use thiserror::Error;

use crate::contraction::ConditionKind;

/// Errors raised by the library. Solver divergence is reported separately
/// through [`crate::picard::PicardError`] so that the partial report can be
/// carried along.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample index {index} out of range for {n_samples} samples")]
    OutOfRange { index: u64, n_samples: u64 },

    #[error("probability space needs at least one sample")]
    EmptySpace,

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("empty vector")]
    EmptyVector,

    #[error("norm weights must be positive and finite")]
    InvalidWeights,

    #[error("infeasible coefficients for {kind:?}: {reason}")]
    InfeasibleCoefficients { kind: ConditionKind, reason: String },

    #[error("coefficients do not match condition {kind:?}")]
    CoefficientMismatch { kind: ConditionKind },

    #[error("operator produced a non-finite value: {0}")]
    Evaluation(String),

    #[error("pair sample is empty")]
    EmptyPairs,

    #[error("degenerate pair sample: every pair has identical points")]
    DegenerateSample,

    #[error("pair {pair_index} has positive image distance but all reference distances vanish; operator is not contractive")]
    NotContractive { pair_index: usize },

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),

    #[error("feasibility inequality fails for sample {omega_index}")]
    Infeasible { omega_index: u64 },

    #[error(
        "iterate {iteration} for sample {omega_index} left the ball: norm {norm} > radius {rho}"
    )]
    InvarianceViolation {
        omega_index: u64,
        iteration: usize,
        norm: f64,
        rho: f64,
    },

    #[error("need at least {needed} starting points, got {got}")]
    TooFewStarts { needed: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
