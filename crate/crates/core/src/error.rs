//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A regular graph with the requested degree/vertex count cannot exist.
    #[error("no {degree}-regular graph on {n} vertices: n*degree must be even and n > degree")]
    InfeasibleRegularGraph { n: usize, degree: usize },

    /// The configuration-model sampler exhausted its retry budget.
    #[error("graph generation failed after {attempts} attempts (n={n}, degree={degree})")]
    GenerationBudgetExceeded { n: usize, degree: usize, attempts: usize },

    /// Problem size exceeds what dense statevector simulation supports.
    #[error("{n} qubits exceeds the supported maximum of {max}")]
    Capacity { n: usize, max: usize },

    /// Statevector or diagonal length does not match the expected qubit count.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Approximation ratios are only defined for problems with a negative optimum.
    #[error("invalid problem: optimal cost {c_min} is not negative")]
    InvalidProblem { c_min: f64 },

    /// An operation that requires a stationary point received one that is not.
    #[error("not a stationary point: gradient norm {grad_norm:.3e} exceeds {tol:.3e}")]
    NotStationary { grad_norm: f64, tol: f64 },

    /// A contract on the inputs of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Hessian eigenstructure does not match what the caller required.
    #[error("classification mismatch: expected {expected}, found inertia ({n_neg}, {n_zero}, {n_pos})")]
    ClassificationMismatch { expected: &'static str, n_neg: usize, n_zero: usize, n_pos: usize },

    /// A numerical routine produced non-finite values.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Every candidate start of a multistart search failed to converge.
    #[error("no start converged: {0}")]
    AllStartsFailed(String),

    /// Unknown export format or malformed serialized data.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
