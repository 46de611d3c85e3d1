//! Equivalence transformations of `AX + X^T B = C`.
//!
//! | shape   | equation                                  | unknown                      |
//! |---------|-------------------------------------------|------------------------------|
//! | `m >= n`| `A X - B^T X S^T = C - (S C)^T`           | `X` itself, `B^T = S A`      |
//! | `m <= n`| `A Y - B^T Y S^T = C`, `S = B^T D`        | `X = Y - D Y^T B`, `A D = I` |
//! | `m = n` | `Y - S Y S^T = C - (S C)^T`, `S = B^T A^-1` | `X = A^-1 Y`               |
//! | `m = n` | `Z - S Z S^T = C`, `S = B^T A^-1`         | `Y = A^-1 Z`, `X = Y - A^-1 Y^T B` |
//!
//! Every transform requires the spectrum of `S` to be reciprocal free. Under
//! that hypothesis the transformed equation has exactly the solutions that map
//! (through the recovery map) onto solutions of the original equation.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{pinv_full_column_rank, pinv_full_row_rank, DenseMatrix, Lu};
use crate::spectra::{check_matrix, Spectrum};
use crate::tensor::{kron, PermutationMap};

/// Default relative tolerance for `B^T = S A` and `A D = I`.
pub const DEFAULT_HYPOTHESIS_TOL: f64 = 1e-10;

/// The coefficient triple of `AX + X^T B = C` with `A: m x n`, `B: n x m`,
/// `C: m x m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    a: DenseMatrix,
    b: DenseMatrix,
    c: DenseMatrix,
}

impl ProblemInstance {
    pub fn new(a: DenseMatrix, b: DenseMatrix, c: DenseMatrix) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::Shape(format!("A must be non-empty, got {m}x{n}")));
        }
        if b.shape() != (n, m) {
            return Err(Error::DimensionMismatch(format!(
                "B must be {n}x{m} for A of size {m}x{n}, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        if c.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "C must be {m}x{m}, got {}x{}",
                c.rows(),
                c.cols()
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }

    /// Rows of `A`.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Columns of `A`.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `1 + ||A||_F + ||B||_F + ||C||_F`
    pub fn scale(&self) -> f64 {
        1.0 + self.a.frobenius_norm() + self.b.frobenius_norm() + self.c.frobenius_norm()
    }

    pub fn into_parts(self) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
        (self.a, self.b, self.c)
    }
}

/// Which equivalent equation a transform produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EquivalentKind {
    #[serde(rename = "GEN_SYLV_OVER")]
    GenSylvOver,
    #[serde(rename = "GEN_SYLV_UNDER")]
    GenSylvUnder,
    #[serde(rename = "LYAP_OOZAWA")]
    LyapOozawa,
    #[serde(rename = "LYAP_UNDER")]
    LyapUnder,
}

impl EquivalentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GenSylvOver => "GEN_SYLV_OVER",
            Self::GenSylvUnder => "GEN_SYLV_UNDER",
            Self::LyapOozawa => "LYAP_OOZAWA",
            Self::LyapUnder => "LYAP_UNDER",
        }
    }

    pub fn is_lyapunov(self) -> bool {
        matches!(self, Self::LyapOozawa | Self::LyapUnder)
    }
}

impl fmt::Display for EquivalentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Map from the unknown of a transformed equation back to `X`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RecoveryMap {
    /// The transformed unknown is `X`.
    Identity,
    /// `X = A^-1 Y`.
    LeftInvertA { a: DenseMatrix },
    /// `X = Y - D Y^T B`; with `lift`, `Y = D Z` is formed first from the
    /// solution `Z` (the square case where `D = A^-1`).
    UnderRecovery { d: DenseMatrix, b: DenseMatrix, lift: bool },
}

impl RecoveryMap {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "IDENTITY",
            Self::LeftInvertA { .. } => "LEFT_INVERT_A",
            Self::UnderRecovery { .. } => "UNDER_RECOVERY",
        }
    }
}

/// A transformed equation `L Y - R Y S^T = rhs` together with the recovery
/// map to `X`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalentForm {
    pub kind: EquivalentKind,
    /// `L`: `A` for the generalized Sylvester forms, `I` for Lyapunov forms.
    pub coeff_left: DenseMatrix,
    /// `R`: `B^T` for the generalized Sylvester forms, `S` for Lyapunov forms.
    pub coeff_right_outer: DenseMatrix,
    pub s_matrix: DenseMatrix,
    /// `D` with `A D = I` (under-determined and Lyapunov-under routes).
    pub d_matrix: Option<DenseMatrix>,
    pub rhs: DenseMatrix,
    pub recovery: RecoveryMap,
    /// `min |lambda_i lambda_j - 1|` over the spectrum of `S`.
    pub margin: f64,
    pub spectrum: Spectrum,
    pub instance: ProblemInstance,
}

impl EquivalentForm {
    /// Shape of the transformed unknown.
    pub fn unknown_shape(&self) -> (usize, usize) {
        (self.coeff_left.cols(), self.rhs.cols())
    }

    /// `L Y - R Y S^T`
    pub fn apply(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        if y.shape() != self.unknown_shape() {
            return Err(Error::DimensionMismatch(format!(
                "{} unknown must be {}x{}, got {}x{}",
                self.kind,
                self.unknown_shape().0,
                self.unknown_shape().1,
                y.rows(),
                y.cols()
            )));
        }
        let left = self.coeff_left.matmul(y)?;
        let right = self.coeff_right_outer.matmul(y)?.matmul(&self.s_matrix.transpose())?;
        left.try_sub(&right)
    }

    /// `||L Y - R Y S^T - rhs||_F`
    pub fn residual(&self, y: &DenseMatrix) -> Result<f64> {
        Ok(self.apply(y)?.try_sub(&self.rhs)?.frobenius_norm())
    }
}

/// Tolerances used when validating transform hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    /// Relative tolerance for `B^T = S A` and `A D = I`.
    pub hypothesis_tol: f64,
    /// Reciprocal-free tolerance; `None` selects `1e-8 (1 + max|lambda|^2)`.
    pub reciprocal_tol: Option<f64>,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            hypothesis_tol: DEFAULT_HYPOTHESIS_TOL,
            reciprocal_tol: None,
        }
    }
}

/// `S = B^T A^+` for `m >= n` and `A` of full column rank, so `B^T = S A`.
pub fn build_s_over(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::Shape(format!("S = B^T A^+ needs m >= n, got A of size {m}x{n}")));
    }
    if b.shape() != (n, m) {
        return Err(Error::DimensionMismatch(format!("B must be {n}x{m}")));
    }
    b.transpose().matmul(&pinv_full_column_rank(a)?)
}

/// Result of checking one of the linear hypotheses `B^T = S A`, `A D = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Consistency {
    pub consistent: bool,
    pub residual: f64,
    pub allowed: f64,
}

/// Checks `||B^T - S A||_F <= tol (1 + ||B||_F)`.
pub fn verify_s_consistency(a: &DenseMatrix, b: &DenseMatrix, s: &DenseMatrix, tol: f64) -> Result<Consistency> {
    let (m, n) = a.shape();
    if b.shape() != (n, m) || s.shape() != (m, m) {
        return Err(Error::Shape(format!(
            "need A {m}x{n}, B {n}x{m}, S {m}x{m}; got B {}x{}, S {}x{}",
            b.rows(),
            b.cols(),
            s.rows(),
            s.cols()
        )));
    }
    let residual = b.transpose().try_sub(&s.matmul(a)?)?.frobenius_norm();
    let allowed = tol * (1.0 + b.frobenius_norm());
    Ok(Consistency {
        consistent: residual <= allowed,
        residual,
        allowed,
    })
}

/// `D = A^+` for `m <= n` and `A` of full row rank, so `A D = I_m`.
pub fn build_d_under(a: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = a.shape();
    if m > n {
        return Err(Error::Shape(format!(
            "D = A^+ with A D = I needs m <= n, got A of size {m}x{n}"
        )));
    }
    pinv_full_row_rank(a)
}

/// Checks `||A D - I_m||_F <= tol (1 + ||A||_F)`.
pub fn verify_right_inverse(a: &DenseMatrix, d: &DenseMatrix, tol: f64) -> Result<Consistency> {
    let (m, n) = a.shape();
    if d.shape() != (n, m) {
        return Err(Error::Shape(format!(
            "D must be {n}x{m}, got {}x{}",
            d.rows(),
            d.cols()
        )));
    }
    let residual = a.matmul(d)?.try_sub(&DenseMatrix::identity(m))?.frobenius_norm();
    let allowed = tol * (1.0 + a.frobenius_norm());
    Ok(Consistency {
        consistent: residual <= allowed,
        residual,
        allowed,
    })
}

fn reciprocal_gate(s: &DenseMatrix, opts: &TransformOptions) -> Result<(Spectrum, f64)> {
    let (sp, check) = check_matrix(s, opts.reciprocal_tol)?;
    let margin = check.into_result()?;
    Ok((sp, margin))
}

/// `C - (S C)^T`
fn over_rhs(s: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    c.try_sub(&s.matmul(c)?.transpose())
}

/// `A X - B^T X S^T = C - (S C)^T` for a user-supplied `S` with `B^T = S A`.
///
/// `m >= n` is not enforced: any `S` passing the consistency check is
/// accepted, though [`build_s_over`] can only construct one when `m >= n`.
pub fn transform_over(inst: &ProblemInstance, s: &DenseMatrix, opts: &TransformOptions) -> Result<EquivalentForm> {
    let cons = verify_s_consistency(inst.a(), inst.b(), s, opts.hypothesis_tol)?;
    if !cons.consistent {
        return Err(Error::InconsistentS {
            residual: cons.residual,
            allowed: cons.allowed,
        });
    }
    let (spectrum, margin) = reciprocal_gate(s, opts)?;
    Ok(EquivalentForm {
        kind: EquivalentKind::GenSylvOver,
        coeff_left: inst.a().clone(),
        coeff_right_outer: inst.b().transpose(),
        s_matrix: s.clone(),
        d_matrix: None,
        rhs: over_rhs(s, inst.c())?,
        recovery: RecoveryMap::Identity,
        margin,
        spectrum,
        instance: inst.clone(),
    })
}

/// [`transform_over`] with the canonical `S = B^T A^+`.
pub fn transform_over_canonical(inst: &ProblemInstance, opts: &TransformOptions) -> Result<EquivalentForm> {
    let s = build_s_over(inst.a(), inst.b())?;
    transform_over(inst, &s, opts)
}

/// `A Y - B^T Y S^T = C` with `S = B^T D`, for a `D` satisfying `A D = I_m`.
pub fn transform_under(inst: &ProblemInstance, d: &DenseMatrix, opts: &TransformOptions) -> Result<EquivalentForm> {
    let (m, n) = (inst.m(), inst.n());
    if m > n {
        return Err(Error::Shape(format!(
            "A D = I_m is impossible for A of size {m}x{n} with m > n"
        )));
    }
    let cons = verify_right_inverse(inst.a(), d, opts.hypothesis_tol)?;
    if !cons.consistent {
        return Err(Error::BadLeftInverse {
            residual: cons.residual,
            allowed: cons.allowed,
        });
    }
    let bt = inst.b().transpose();
    let s = bt.matmul(d)?;
    let (spectrum, margin) = reciprocal_gate(&s, opts)?;
    Ok(EquivalentForm {
        kind: EquivalentKind::GenSylvUnder,
        coeff_left: inst.a().clone(),
        coeff_right_outer: bt,
        s_matrix: s,
        d_matrix: Some(d.clone()),
        rhs: inst.c().clone(),
        recovery: RecoveryMap::UnderRecovery {
            d: d.clone(),
            b: inst.b().clone(),
            lift: false,
        },
        margin,
        spectrum,
        instance: inst.clone(),
    })
}

/// [`transform_under`] with the canonical `D = A^+`.
pub fn transform_under_canonical(inst: &ProblemInstance, opts: &TransformOptions) -> Result<EquivalentForm> {
    let d = build_d_under(inst.a())?;
    transform_under(inst, &d, opts)
}

/// `A^-1` and `S = B^T A^-1` for the square routes.
fn square_setup(inst: &ProblemInstance) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, n) = (inst.m(), inst.n());
    if m != n {
        return Err(Error::Shape(format!("square route needs m = n, got {m}x{n}")));
    }
    let a_inv = Lu::factor(inst.a()).map_err(|_| Error::SingularA)?.inverse();
    let s = inst.b().transpose().matmul(&a_inv)?;
    Ok((a_inv, s))
}

/// `Y - S Y S^T = C - (S C)^T` with `S = B^T A^-1`, `Y = A X`.
pub fn transform_square_oozawa(inst: &ProblemInstance, opts: &TransformOptions) -> Result<EquivalentForm> {
    let (_, s) = square_setup(inst)?;
    let (spectrum, margin) = reciprocal_gate(&s, opts)?;
    Ok(EquivalentForm {
        kind: EquivalentKind::LyapOozawa,
        coeff_left: DenseMatrix::identity(inst.m()),
        coeff_right_outer: s.clone(),
        rhs: over_rhs(&s, inst.c())?,
        s_matrix: s,
        d_matrix: None,
        recovery: RecoveryMap::LeftInvertA { a: inst.a().clone() },
        margin,
        spectrum,
        instance: inst.clone(),
    })
}

/// `Z - S Z S^T = C` with `S = B^T A^-1`; recovery `Y = A^-1 Z`,
/// `X = Y - A^-1 Y^T B`.
pub fn transform_square_under(inst: &ProblemInstance, opts: &TransformOptions) -> Result<EquivalentForm> {
    let (a_inv, s) = square_setup(inst)?;
    let (spectrum, margin) = reciprocal_gate(&s, opts)?;
    Ok(EquivalentForm {
        kind: EquivalentKind::LyapUnder,
        coeff_left: DenseMatrix::identity(inst.m()),
        coeff_right_outer: s.clone(),
        rhs: inst.c().clone(),
        s_matrix: s,
        d_matrix: Some(a_inv.clone()),
        recovery: RecoveryMap::UnderRecovery {
            d: a_inv,
            b: inst.b().clone(),
            lift: true,
        },
        margin,
        spectrum,
        instance: inst.clone(),
    })
}

/// Applies the recovery map. Returns `X` and, for the lifted square route,
/// the intermediate `Y = A^-1 Z`.
pub fn recover_x_detailed(
    recovery: &RecoveryMap,
    solution: &DenseMatrix,
) -> Result<(DenseMatrix, Option<DenseMatrix>)> {
    match recovery {
        RecoveryMap::Identity => Ok((solution.clone(), None)),
        RecoveryMap::LeftInvertA { a } => {
            let lu = Lu::factor(a).map_err(|_| Error::SingularA)?;
            Ok((lu.solve_matrix(solution)?, None))
        }
        RecoveryMap::UnderRecovery { d, b, lift } => {
            let y = if *lift { d.matmul(solution)? } else { solution.clone() };
            let x = y.try_sub(&d.matmul(&y.transpose())?.matmul(b)?)?;
            Ok((x, lift.then_some(y)))
        }
    }
}

pub fn recover_x(form: &EquivalentForm, solution: &DenseMatrix) -> Result<DenseMatrix> {
    if solution.shape() != form.unknown_shape() {
        return Err(Error::DimensionMismatch(format!(
            "{} solution must be {}x{}, got {}x{}",
            form.kind,
            form.unknown_shape().0,
            form.unknown_shape().1,
            solution.rows(),
            solution.cols()
        )));
    }
    Ok(recover_x_detailed(&form.recovery, solution)?.0)
}

/// `K = P_mm (I_m (x) S)`, whose square is `S (x) S`.
pub fn k_matrix_over(s: &DenseMatrix) -> Result<DenseMatrix> {
    let m = s.rows();
    PermutationMap::new(m, m).permute_rows(&kron(&DenseMatrix::identity(m), s))
}

/// `K = P_nm (D (x) B^T)`, whose square is `B^T D (x) D B^T`.
pub fn k_matrix_under(d: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, m) = d.shape();
    if b.shape() != (n, m) {
        return Err(Error::DimensionMismatch(format!(
            "B must match D ({n}x{m}), got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    PermutationMap::new(n, m).permute_rows(&kron(d, &b.transpose()))
}

/// `G = I - P_mm (I_m (x) S)`, nonsingular when the spectrum of `S` is
/// reciprocal free. Maps `vec(C)` to `vec(C - (S C)^T)`.
pub fn build_g_over(s: &DenseMatrix) -> Result<DenseMatrix> {
    let k = k_matrix_over(s)?;
    DenseMatrix::identity(k.rows()).try_sub(&k)
}

/// `G = I - P_nm (D (x) B^T)`, nonsingular when the spectrum of `B^T D` is
/// reciprocal free. Maps `vec(Y)` to `vec(Y - D Y^T B)`.
pub fn build_g_under(d: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let k = k_matrix_under(d, b)?;
    DenseMatrix::identity(k.rows()).try_sub(&k)
}

/// The `G` matrix relevant to a form: [`build_g_over`] for the `C - (S C)^T`
/// right-hand sides, [`build_g_under`] for the recovery `X = Y - D Y^T B`.
pub fn build_g_matrix(form: &EquivalentForm) -> Result<DenseMatrix> {
    match (&form.kind, &form.recovery) {
        (EquivalentKind::GenSylvOver | EquivalentKind::LyapOozawa, _) => build_g_over(&form.s_matrix),
        (_, RecoveryMap::UnderRecovery { d, b, .. }) => build_g_under(d, b),
        _ => unreachable!("under-type forms always carry an under recovery"),
    }
}

/// LU diagnostic of `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GDiagnostic {
    pub dim: usize,
    pub nonsingular: bool,
    /// Smallest LU pivot, `0` when factorization failed.
    pub min_pivot: f64,
}

pub fn g_diagnostic(form: &EquivalentForm) -> Result<GDiagnostic> {
    let g = build_g_matrix(form)?;
    Ok(match Lu::factor(&g) {
        Ok(lu) => GDiagnostic {
            dim: g.rows(),
            nonsingular: true,
            min_pivot: lu.min_pivot(),
        },
        Err(_) => GDiagnostic {
            dim: g.rows(),
            nonsingular: false,
            min_pivot: 0.0,
        },
    })
}
