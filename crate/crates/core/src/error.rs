use thiserror::Error;

use crate::basis::BasisString;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: a bad matrix, support list or file field. `at` names
    /// the offending location (e.g. `terms[2].matrix[0][1]`).
    #[error("invalid input at {at}: {msg}")]
    Invalid { at: String, msg: String },

    #[error("term {term} is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { term: usize, min_eigenvalue: f64 },

    #[error("{what} is not stoquastic: positive off-diagonal entry {value:.3e} in term {term} at ({row}, {col})")]
    NotStoquastic {
        what: String,
        term: usize,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("{n} qubits exceeds the dense limit of {max}")]
    Capacity { n: usize, max: usize },

    #[error("string {x} has zero diagonal projector weight ({weight:.3e})")]
    BadString { x: BasisString, weight: f64 },

    #[error("string {y} differs from {x} outside the projector support")]
    Domain { x: BasisString, y: BasisString },

    #[error("string {x} is not in the support of a ground state: {reason}")]
    NotInSupport { x: BasisString, reason: String },

    #[error("walk left the ground support at step {step}: {source}")]
    WalkFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("annealing failed at stage {stage} on string {x}: {reason}")]
    AnnealFailed {
        stage: usize,
        x: BasisString,
        reason: String,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Parameter(String),

    #[error("instance is not a yes-instance: {0}")]
    NotSatisfiable(String),

    #[error("constraint {constraint} is outside the {{0, 1/2, 1}} projector class: {reason}")]
    InstanceClass { constraint: usize, reason: String },

    #[error("support of size {size} exceeds the locality limit {max}")]
    Locality { size: usize, max: usize },
}

impl Error {
    pub(crate) fn invalid(at: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Invalid {
            at: at.into(),
            msg: msg.into(),
        }
    }
}
