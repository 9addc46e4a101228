use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// `InvalidInput` marks precondition violations (bad geometry, malformed
/// samples, out-of-range parameters) so callers can distinguish usage errors
/// from genuine numerical failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// A fitting loop exhausted its degree budget. Carries the best error it
    /// reached so callers can report how far away the target was.
    #[error("approximation target {target:.3e} not met within budget; best achieved {achieved:.3e}")]
    ApproximationFailure { achieved: f64, target: f64 },

    /// A transported curve vertex left the declared flow domain.
    #[error("curve transport escaped the domain: vertex {vertex} at t = {time} (position {x}, {y})")]
    TransportEscape {
        vertex: usize,
        time: f64,
        x: f64,
        y: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
