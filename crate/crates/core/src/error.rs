use thiserror::Error;

use crate::cochain::CochainSpace;

/// Errors surfaced by the algebraic engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// The requested cochain computation exceeds the configured size budget.
    #[error("resource limit exceeded: computation needs {required} coordinates, limit is {limit}")]
    ResourceLimit { required: usize, limit: usize },

    /// The requested degree is above the configured maximum.
    #[error("degree {degree} exceeds the configured maximum {max}")]
    DegreeLimit { degree: usize, max: usize },

    /// A coboundary image left the constrained cochain span, so the complex
    /// does not close in the given space.
    #[error("closure violated: a degree-{degree} image does not lie in the {space} cochain space")]
    ClosureFailure { degree: usize, space: CochainSpace },

    /// The pair differential applied to the input is nonzero.
    #[error("not a cocycle: maximal residual coordinate {residual}")]
    NotACocycle { residual: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exact linear system that had to be consistent was not.
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
}
