//! Equivalence transformations for the T-congruence Sylvester equation
//! `A X + X^T B = C` with `A: m x n`, `B: n x m`, `C: m x m`.
//!
//! The crate turns the equation into generalized Sylvester or Lyapunov
//! equations (free of `X^T`) whenever the coupling matrix `S` has a
//! reciprocal-free spectrum, solves those forms, maps their solutions back
//! to `X`, and checks everything against a brute-force oracle built on the
//! vectorized `m^2 x mn` linear system.
//!
//! ```
//! use tsylv::{DenseMatrix, ProblemInstance, TransformOptions};
//!
//! let inst = ProblemInstance::new(
//!     DenseMatrix::from_rows(&[[2.0]]).unwrap(),
//!     DenseMatrix::from_rows(&[[1.0]]).unwrap(),
//!     DenseMatrix::from_rows(&[[4.0]]).unwrap(),
//! )
//! .unwrap();
//! let form = tsylv::transforms::transform_square_oozawa(&inst, &TransformOptions::default()).unwrap();
//! let report = tsylv::solvers::solve_transformed(&form, 1e-8).unwrap();
//! assert!((report.x[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod generate;
pub mod instance_file;
pub mod matrix;
pub mod solvers;
pub mod spectra;
pub mod tensor;
pub mod transforms;
pub mod verify;

pub use error::{Error, ReciprocalWitness, Result};
pub use matrix::{ComplexScalar, DenseMatrix};
pub use solvers::{SolveMethod, SolveReport};
pub use spectra::Spectrum;
pub use tensor::PermutationMap;
pub use transforms::{EquivalentForm, EquivalentKind, ProblemInstance, RecoveryMap, TransformOptions};
