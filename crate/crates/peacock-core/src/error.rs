//! Error type shared by all modules.

use thiserror::Error;

/// Library-wide error enumeration.
///
/// Every fallible public operation returns `Result<T, Error>`. Variants carry
/// enough context to be actionable from the CLI without string parsing.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input lies on (or too close to) a branch cut of the requested branch.
    #[error("input z = {z} is within {dist:.3e} of a branch cut (side: {what})")]
    BranchCut { z: String, dist: f64, what: &'static str },

    /// Input lies outside the domain of the requested function/branch.
    #[error("input outside domain: {0}")]
    OutOfDomain(String),

    /// Evaluation requested at (or too close to) a pole.
    #[error("evaluation at a pole: {0}")]
    Pole(String),

    /// An iterative method failed to converge.
    #[error("no convergence in {method} after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { method: &'static str, iterations: usize, residual: f64 },

    /// A linear solve or reduction met a singular (or numerically singular) system.
    #[error("singular system in {0}")]
    Singular(String),

    /// The requested direction sits on a Stokes ray (or too close to one).
    #[error("direction {vartheta} is within {margin} of a Stokes ray")]
    OnStokesRay { vartheta: f64, margin: f64 },

    /// A contour tracer hit an unexpected critical point (saddle connection).
    #[error("saddle connection: contour hit a critical point near z = {0}")]
    SaddleConnection(String),

    /// Geometry or configuration not supported by the implementation.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Invalid argument or configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
