use std::fmt;

use crate::matrix::ComplexScalar;

/// Violating pair reported when a spectrum is not reciprocal free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocalWitness {
    pub i: usize,
    pub j: usize,
    pub lambda_i: ComplexScalar,
    pub lambda_j: ComplexScalar,
    /// `|lambda_i * lambda_j - 1|`
    pub distance: f64,
}

impl fmt::Display for ReciprocalWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda[{}] = {}, lambda[{}] = {}, |product - 1| = {:e}",
            self.i, self.lambda_i, self.j, self.lambda_j, self.distance
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("singular matrix: pivot {pivot:e} at step {step} is below tolerance {tol:e}")]
    SingularMatrix { step: usize, pivot: f64, tol: f64 },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("rank deficient: estimated rank {rank}, required {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("coefficient matrix A is singular")]
    SingularA,

    #[error("spectrum of S is not reciprocal free: {0}")]
    NotReciprocalFree(ReciprocalWitness),

    #[error("S is inconsistent with B^T = S A (residual {residual:e}, allowed {allowed:e})")]
    InconsistentS { residual: f64, allowed: f64 },

    #[error("D is not a right inverse of A (||AD - I|| = {residual:e}, allowed {allowed:e})")]
    BadLeftInverse { residual: f64, allowed: f64 },

    #[error("instance generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
