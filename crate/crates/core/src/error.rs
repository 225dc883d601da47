use thiserror::Error;

use crate::simjoint::SimilarityCertificate;

/// Failures raised anywhere in the analysis pipeline.
///
/// Each variant corresponds to one failure class with its own CLI exit code.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure in {context} after {iterations} iterations")]
    NumericalFailure { context: String, iterations: usize },

    #[error("matrix is numerically singular (smallest singular value {smallest_singular_value:e})")]
    Singular { smallest_singular_value: f64 },

    #[error("ill-posed structure: {0}")]
    IllPosedStructure(String),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("family does not commute: members {first} and {second} have residual {residual:e}")]
    CommutativityViolation {
        first: usize,
        second: usize,
        residual: f64,
    },

    #[error("decomposition is degenerate (smallest singular value {smallest_singular_value:e})")]
    DegenerateDecomposition { smallest_singular_value: f64 },

    #[error("verification failed: member {member} has conjugated norm {norm}")]
    VerificationFailure {
        member: usize,
        norm: f64,
        certificate: Box<SimilarityCertificate>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
