//! Crate-wide error type.
//!
//! One enum covers every module so that call sites composing simulator,
//! bound and verifier stages propagate a single error type. Variants carry a
//! human-readable message naming the offending quantity.

use thiserror::Error;

/// Errors reported by distribution constructors, solvers, the simulator and
/// the verifier.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range (non-finite, non-positive
    /// rate/shape, empty grid, …).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested operation is not defined for this input (e.g. drawing
    /// samples from the very-light law, or an unsupported service mode).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A conditional expectation was requested given an event of probability
    /// zero.
    #[error("conditioning event has probability zero: {0}")]
    ConditioningOnNull(String),

    /// The system has no positive decay rate (unstable or critically loaded),
    /// so exponential-tail machinery does not apply.
    #[error("unstable system: {0}")]
    Unstable(String),

    /// The closed-form bound fit only covers a fixed family of arrival laws.
    #[error("unsupported arrival law: {0}")]
    UnsupportedArrival(String),

    /// No decay parameter satisfies the feasibility constraint of the
    /// union-bound optimization.
    #[error("no feasible decay parameter: {0}")]
    NoFeasibleTheta(String),

    /// Input arrays disagree on the number of jobs or queues.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The exhaustive oracle was asked to enumerate an instance beyond its
    /// guard rails.
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    /// Two curves that must share an x-grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An iterative numerical routine failed to converge.
    #[error("numerical routine failed: {0}")]
    Numerics(String),

    /// Underlying I/O failure while writing artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
