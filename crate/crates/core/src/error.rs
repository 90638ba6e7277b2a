//! Error type shared by every module in the crate.

use thiserror::Error;

/// All the ways a library call can reject its input or detect a broken
/// internal contract.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Torus construction rejected the requested shape.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A probability argument fell outside `[0, 1]`.
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    /// An argument failed validation for reasons specific to the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two fields that must share a torus were built on different ones.
    #[error("fields use different geometries")]
    GeometryMismatch,

    /// The parameter regime is outside what the operation defines.
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),

    /// An internal invariant failed mid-computation; the caller's
    /// preconditions did not actually hold.
    #[error("contract violation: {0}")]
    ContractViolation(String),
}
