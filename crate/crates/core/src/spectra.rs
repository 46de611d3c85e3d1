//! Spectra of real square matrices and the reciprocal-free test
//! (`lambda_i * lambda_j != 1` for every ordered pair, including `i == j`).

use serde::Serialize;

use crate::error::{Error, ReciprocalWitness, Result};
use crate::matrix::{eigenvalues, pivot_tolerance, ComplexScalar, DenseMatrix, Lu};
use crate::tensor::kron;

/// Eigenvalues of a square matrix, with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<ComplexScalar>,
    source_dim: usize,
}

impl Spectrum {
    /// Wraps a precomputed eigenvalue list.
    pub fn from_values(values: Vec<ComplexScalar>) -> Self {
        let source_dim = values.len();
        Self { values, source_dim }
    }

    pub fn values(&self) -> &[ComplexScalar] {
        &self.values
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// `1e-8 * (1 + max |lambda|^2)`
    pub fn default_reciprocal_tol(&self) -> f64 {
        let r = self.max_modulus();
        1e-8 * (1.0 + r * r)
    }
}

pub fn spectrum(s: &DenseMatrix) -> Result<Spectrum> {
    Ok(Spectrum::from_values(eigenvalues(s)?))
}

/// Outcome of the reciprocal-free test.
///
/// `closest` is the ordered pair minimising `|lambda_i lambda_j - 1|` (first in
/// row-major pair order on ties); it is `None` only for an empty spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocalCheck {
    pub free: bool,
    pub tol: f64,
    pub closest: Option<ReciprocalWitness>,
}

impl ReciprocalCheck {
    /// `min |lambda_i lambda_j - 1|` over all ordered pairs.
    pub fn margin(&self) -> f64 {
        self.closest.map_or(f64::INFINITY, |w| w.distance)
    }

    /// The margin when free, otherwise [`Error::NotReciprocalFree`] with the
    /// witness pair.
    pub fn into_result(self) -> Result<f64> {
        match (self.free, self.closest) {
            (true, _) => Ok(self.margin()),
            (false, Some(w)) => Err(Error::NotReciprocalFree(w)),
            (false, None) => unreachable!("an empty spectrum is always free"),
        }
    }
}

pub fn is_reciprocal_free(sp: &Spectrum, tol: f64) -> ReciprocalCheck {
    let vals = sp.values();
    let mut closest: Option<ReciprocalWitness> = None;
    for (i, &a) in vals.iter().enumerate() {
        for (j, &b) in vals.iter().enumerate() {
            let distance = (a * b - ComplexScalar::ONE).modulus();
            if closest.is_none_or(|c| distance < c.distance) {
                closest = Some(ReciprocalWitness {
                    i,
                    j,
                    lambda_i: a,
                    lambda_j: b,
                    distance,
                });
            }
        }
    }
    let free = closest.is_none_or(|c| c.distance > tol);
    ReciprocalCheck { free, tol, closest }
}

/// Computes the spectrum of `s` and tests it with the default tolerance
/// unless `tol` is given.
pub fn check_matrix(s: &DenseMatrix, tol: Option<f64>) -> Result<(Spectrum, ReciprocalCheck)> {
    let sp = spectrum(s)?;
    let tol = tol.unwrap_or_else(|| sp.default_reciprocal_tol());
    let check = is_reciprocal_free(&sp, tol);
    Ok((sp, check))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    Free,
    NotFree,
}

/// Eigenvalue-free cross-check: the spectrum of `S` is reciprocal free iff
/// `I - S (x) S` is nonsingular. Singularity is judged by LU pivots against
/// `pivot_tol` (default: the LU pivot tolerance of `I - S (x) S`).
pub fn reciprocal_free_det_check(s: &DenseMatrix, pivot_tol: Option<f64>) -> Result<Decision> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "S must be square, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let m = s.rows();
    let g = &DenseMatrix::identity(m * m) - &kron(s, s);
    let tol = pivot_tol.unwrap_or_else(|| pivot_tolerance(&g));
    Ok(match Lu::factor_with_tol(&g, tol) {
        Ok(_) => Decision::Free,
        Err(_) => Decision::NotFree,
    })
}
