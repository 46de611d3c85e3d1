//! Two independent ways to solve `AX + X^T B = C`: the stacked
//! `{I (x) A + P_mm (I (x) B^T)} vec(X) = vec(C)` system used as the oracle,
//! and the Kronecker-assembled transformed equations followed by recovery.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{least_squares_min_norm, DenseMatrix, Lu};
use crate::tensor::{kron, unvec, vec, PermutationMap};
use crate::transforms::{recover_x_detailed, EquivalentForm, EquivalentKind, ProblemInstance};

/// Default relative tolerance for consistency and comparisons.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SolveMethod {
    #[serde(rename = "DIRECT_VEC")]
    DirectVec,
    #[serde(rename = "OVER")]
    Over,
    #[serde(rename = "UNDER")]
    Under,
    #[serde(rename = "LYAP_OOZAWA")]
    LyapOozawa,
    #[serde(rename = "LYAP_UNDER")]
    LyapUnder,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DirectVec => "DIRECT_VEC",
            Self::Over => "OVER",
            Self::Under => "UNDER",
            Self::LyapOozawa => "LYAP_OOZAWA",
            Self::LyapUnder => "LYAP_UNDER",
        }
    }
}

impl From<EquivalentKind> for SolveMethod {
    fn from(kind: EquivalentKind) -> Self {
        match kind {
            EquivalentKind::GenSylvOver => Self::Over,
            EquivalentKind::GenSylvUnder => Self::Under,
            EquivalentKind::LyapOozawa => Self::LyapOozawa,
            EquivalentKind::LyapUnder => Self::LyapUnder,
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub method: SolveMethod,
    /// `n x m` solution (minimum-norm representative of the solved system).
    pub x: DenseMatrix,
    /// `||A X + X^T B - C||_F`
    pub residual: f64,
    /// Numerical rank of the assembled system.
    pub system_rank: usize,
    /// Number of unknowns of the assembled system.
    pub unknowns: usize,
    /// `residual <= tol * scale` with `scale = 1 + ||A|| + ||B|| + ||C||`.
    pub consistent: bool,
    /// Reciprocal-free margin of `S`; `None` on the direct route.
    pub margin: Option<f64>,
    /// `A^-1 Z` on the lifted square route.
    pub intermediate: Option<DenseMatrix>,
}

impl SolveReport {
    /// Whether the assembled system pins down a unique solution.
    pub fn is_unique(&self) -> bool {
        self.system_rank == self.unknowns
    }
}

/// `M = I_m (x) A + P_mm (I_m (x) B^T)` and `c = vec(C)`, so that
/// `M vec(X) = vec(A X + X^T B)`.
pub fn assemble_vec_system(inst: &ProblemInstance) -> (DenseMatrix, Vec<f64>) {
    let m = inst.m();
    let eye = DenseMatrix::identity(m);
    let left = kron(&eye, inst.a());
    let right = PermutationMap::new(m, m)
        .permute_rows(&kron(&eye, &inst.b().transpose()))
        .expect("P_mm acts on m^2 rows");
    (&left + &right, vec(inst.c()))
}

/// `||A X + X^T B - C||_F`
pub fn residual(inst: &ProblemInstance, x: &DenseMatrix) -> Result<f64> {
    if x.shape() != (inst.n(), inst.m()) {
        return Err(Error::DimensionMismatch(format!(
            "X must be {}x{}, got {}x{}",
            inst.n(),
            inst.m(),
            x.rows(),
            x.cols()
        )));
    }
    let lhs = inst.a().matmul(x)?.try_add(&x.transpose().matmul(inst.b())?)?;
    Ok(lhs.try_sub(inst.c())?.frobenius_norm())
}

/// Minimum-norm least-squares solve of the stacked system. Never refuses;
/// inconsistency shows up in `consistent` and `residual`.
pub fn solve_direct(inst: &ProblemInstance, tol: f64) -> SolveReport {
    let (mat, c) = assemble_vec_system(inst);
    let ls = least_squares_min_norm(&mat, &c, None).expect("stacked system is m^2 x mn");
    let x = unvec(&ls.solution, inst.n(), inst.m()).expect("solution has length mn");
    let res = residual(inst, &x).expect("X has shape n x m");
    SolveReport {
        method: SolveMethod::DirectVec,
        x,
        residual: res,
        system_rank: ls.rank,
        unknowns: mat.cols(),
        consistent: res <= tol * inst.scale(),
        margin: None,
        intermediate: None,
    }
}

/// Solves `L Y - R Y S^T = rhs` through `(I (x) L - S (x) R) vec(Y) = vec(rhs)`
/// and maps `Y` back to `X`.
pub fn solve_transformed(form: &EquivalentForm, tol: f64) -> Result<SolveReport> {
    let inst = &form.instance;
    let m = form.rhs.cols();
    let (yr, yc) = form.unknown_shape();
    let mat =
        kron(&DenseMatrix::identity(m), &form.coeff_left).try_sub(&kron(&form.s_matrix, &form.coeff_right_outer))?;
    let ls = least_squares_min_norm(&mat, &vec(&form.rhs), None)?;
    let y = unvec(&ls.solution, yr, yc)?;
    let (x, intermediate) = recover_x_detailed(&form.recovery, &y)?;
    let res = residual(inst, &x)?;
    Ok(SolveReport {
        method: form.kind.into(),
        x,
        residual: res,
        system_rank: ls.rank,
        unknowns: mat.cols(),
        consistent: res <= tol * inst.scale(),
        margin: Some(form.margin),
        intermediate,
    })
}

/// `Y - S Y S^T = Q` via LU on `I - S (x) S`.
pub fn solve_lyapunov_kron(s: &DenseMatrix, q: &DenseMatrix) -> Result<DenseMatrix> {
    if !s.is_square() || q.shape() != s.shape() {
        return Err(Error::DimensionMismatch(format!(
            "S and Q must be square of equal size, got {}x{} and {}x{}",
            s.rows(),
            s.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let m = s.rows();
    let sys = DenseMatrix::identity(m * m).try_sub(&kron(s, s))?;
    let y = Lu::factor(&sys)?.solve(&vec(q))?;
    unvec(&y, m, m)
}

/// Outcome of comparing two solve reports for the same instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub equivalent: bool,
    pub allowed_residual: f64,
    /// `||X1 - X2||_F / max(||X1||_F, ||X2||_F)`, only when both systems
    /// have a unique solution.
    pub x_relative_diff: Option<f64>,
}

/// Both reports must solve the instance to `tol * scale`. When both systems
/// are uniquely solvable the solutions must also agree to `tol` relative.
pub fn compare_solutions(r1: &SolveReport, r2: &SolveReport, inst: &ProblemInstance, tol: f64) -> Comparison {
    let allowed = tol * inst.scale();
    let residuals_ok = r1.residual <= allowed && r2.residual <= allowed;
    let x_relative_diff = (r1.is_unique() && r2.is_unique()).then(|| relative_diff(&r1.x, &r2.x));
    let agree = x_relative_diff.is_none_or(|d| d <= tol);
    Comparison {
        equivalent: residuals_ok && agree,
        allowed_residual: allowed,
        x_relative_diff,
    }
}

/// `||a - b||_F / max(||a||_F, ||b||_F)`, zero when both vanish.
pub fn relative_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let diff = match a.try_sub(b) {
        Ok(d) => d.frobenius_norm(),
        Err(_) => return f64::INFINITY,
    };
    let denom = a.frobenius_norm().max(b.frobenius_norm());
    if denom == 0.0 {
        diff
    } else {
        diff / denom
    }
}
