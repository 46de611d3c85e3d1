use super::DenseMatrix;
use crate::error::{Error, Result};

/// Default relative rank cutoff `max(rows, cols) * eps`; multiplied by
/// `|R_00|` to give the absolute threshold.
pub fn rank_tolerance(m: &DenseMatrix) -> f64 {
    m.rows().max(m.cols()) as f64 * f64::EPSILON
}

/// Householder QR with column pivoting, `M P = Q R`.
///
/// Householder vectors are kept below the diagonal of `qr` with an implicit
/// leading one; `perm[j]` is the original column sitting at position `j`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    qr: DenseMatrix,
    tau: Vec<f64>,
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(m: &DenseMatrix) -> Self {
        householder(m.clone(), true)
    }

    fn steps(&self) -> usize {
        self.tau.len()
    }

    /// Diagonal of R, non-increasing in magnitude up to rounding.
    pub fn r_diagonal(&self) -> Vec<f64> {
        (0..self.steps()).map(|k| self.qr[(k, k)]).collect()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Number of diagonal entries of R above `rel_tol * |R_00|`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let diag = self.r_diagonal();
        let Some(&lead) = diag.first() else { return 0 };
        let cutoff = rel_tol * lead.abs();
        if lead == 0.0 {
            return 0;
        }
        diag.iter().take_while(|d| d.abs() > cutoff).count()
    }

    /// Applies `Q^T` in place.
    fn apply_qt(&self, b: &mut [f64]) {
        apply_reflectors(&self.qr, &self.tau, b);
    }
}

fn apply_reflectors(qr: &DenseMatrix, tau: &[f64], b: &mut [f64]) {
    let rows = qr.rows();
    for (k, &t) in tau.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let mut w = b[k];
        for i in k + 1..rows {
            w += qr[(i, k)] * b[i];
        }
        w *= t;
        b[k] -= w;
        for i in k + 1..rows {
            b[i] -= w * qr[(i, k)];
        }
    }
}

fn householder(mut a: DenseMatrix, pivot: bool) -> PivotedQr {
    let (rows, cols) = a.shape();
    let steps = rows.min(cols);
    let mut tau = Vec::with_capacity(steps);
    let mut perm: Vec<usize> = (0..cols).collect();

    for k in 0..steps {
        if pivot {
            let col_norm = |a: &DenseMatrix, j: usize| (k..rows).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>();
            let mut best = k;
            let mut best_norm = col_norm(&a, k);
            for j in k + 1..cols {
                let nj = col_norm(&a, j);
                if nj > best_norm {
                    best = j;
                    best_norm = nj;
                }
            }
            if best != k {
                for i in 0..rows {
                    let tmp = a[(i, k)];
                    a[(i, k)] = a[(i, best)];
                    a[(i, best)] = tmp;
                }
                perm.swap(k, best);
            }
        }

        let norm = (k..rows).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            tau.push(0.0);
            continue;
        }
        let x0 = a[(k, k)];
        let beta = if x0 >= 0.0 { -norm } else { norm };
        let t = (beta - x0) / beta;
        let scale = 1.0 / (x0 - beta);
        for i in k + 1..rows {
            a[(i, k)] *= scale;
        }
        a[(k, k)] = beta;

        for j in k + 1..cols {
            let mut w = a[(k, j)];
            for i in k + 1..rows {
                w += a[(i, k)] * a[(i, j)];
            }
            w *= t;
            a[(k, j)] -= w;
            for i in k + 1..rows {
                let v = a[(i, k)];
                a[(i, j)] -= w * v;
            }
        }
        tau.push(t);
    }
    PivotedQr { qr: a, tau, perm }
}

/// Numerical rank from column-pivoted QR. `rel_tol` defaults to
/// [`rank_tolerance`].
pub fn rank(m: &DenseMatrix, rel_tol: Option<f64>) -> usize {
    PivotedQr::new(m).rank(rel_tol.unwrap_or_else(|| rank_tolerance(m)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// `||M x - rhs||_2`
    pub residual_norm: f64,
    pub rank: usize,
}

/// Minimum-norm least-squares solution through a complete orthogonal
/// decomposition: pivoted QR of `M`, then QR of the leading `rank` rows of
/// `R` transposed.
///
/// Rank deficiency and inconsistency are reported, never raised, except for
/// a length mismatch between `M` and `rhs`.
pub fn least_squares_min_norm(m: &DenseMatrix, rhs: &[f64], rel_tol: Option<f64>) -> Result<LeastSquares> {
    let (rows, cols) = m.shape();
    if rhs.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, expected {rows}",
            rhs.len()
        )));
    }
    let qr = PivotedQr::new(m);
    let r = qr.rank(rel_tol.unwrap_or_else(|| rank_tolerance(m)));

    let mut qtb = rhs.to_vec();
    qr.apply_qt(&mut qtb);
    let d = &qtb[..r];

    // y solves [R11 R12] y = d with minimum norm.
    let mut y = vec![0.0; cols];
    if r == cols {
        for i in (0..r).rev() {
            let s: f64 = (i + 1..r).map(|j| qr.qr[(i, j)] * y[j]).sum();
            y[i] = (d[i] - s) / qr.qr[(i, i)];
        }
    } else if r > 0 {
        // T^T = Z [U; 0] with T = R[0..r, ..], so T = U^T Z_r^T.
        let tt = DenseMatrix::from_fn(cols, r, |i, j| if j <= i { qr.qr[(j, i)] } else { 0.0 });
        let z = householder(tt, false);
        // Forward substitution U^T w = d.
        let mut w = vec![0.0; cols];
        for i in 0..r {
            let s: f64 = (0..i).map(|j| z.qr[(j, i)] * w[j]).sum();
            w[i] = (d[i] - s) / z.qr[(i, i)];
        }
        // y = Z w, applying reflectors in reverse order.
        for k in (0..z.tau.len()).rev() {
            let t = z.tau[k];
            if t == 0.0 {
                continue;
            }
            let mut s = w[k];
            for i in k + 1..cols {
                s += z.qr[(i, k)] * w[i];
            }
            s *= t;
            w[k] -= s;
            for i in k + 1..cols {
                w[i] -= s * z.qr[(i, k)];
            }
        }
        y = w;
    }

    let mut solution = vec![0.0; cols];
    for (j, &p) in qr.perm.iter().enumerate() {
        solution[p] = y[j];
    }
    let residual_norm = m
        .matvec(&solution)?
        .iter()
        .zip(rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(LeastSquares {
        solution,
        residual_norm,
        rank: r,
    })
}

/// `A^+ = (A^T A)^{-1} A^T` for `A` with full column rank.
///
/// Computed column by column as least-squares solutions against the unit
/// vectors, which avoids squaring the condition number of `A`.
pub fn pinv_full_column_rank(a: &DenseMatrix) -> Result<DenseMatrix> {
    pinv_by_columns(a, a.cols())
}

/// `A^+ = A^T (A A^T)^{-1}` for `A` with full row rank, as minimum-norm
/// solutions against the unit vectors.
pub fn pinv_full_row_rank(a: &DenseMatrix) -> Result<DenseMatrix> {
    pinv_by_columns(a, a.rows())
}

fn pinv_by_columns(a: &DenseMatrix, required: usize) -> Result<DenseMatrix> {
    let r = rank(a, None);
    if r < required {
        return Err(Error::RankDeficient { rank: r, required });
    }
    let (rows, cols) = a.shape();
    let mut out = DenseMatrix::zeros(cols, rows);
    let mut e = vec![0.0; rows];
    for k in 0..rows {
        e[k] = 1.0;
        let ls = least_squares_min_norm(a, &e, None)?;
        e[k] = 0.0;
        for i in 0..cols {
            out[(i, k)] = ls.solution[i];
        }
    }
    Ok(out)
}
