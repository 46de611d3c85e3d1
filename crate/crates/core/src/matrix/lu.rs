use super::DenseMatrix;
use crate::error::{Error, Result};

/// Pivot threshold `dim * eps * ||M||_inf` below which a matrix is treated as
/// numerically singular.
pub fn pivot_tolerance(m: &DenseMatrix) -> f64 {
    m.rows() as f64 * f64::EPSILON * m.inf_norm()
}

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    // L (unit lower, below diagonal) and U packed together.
    lu: DenseMatrix,
    perm: Vec<usize>,
    min_pivot: f64,
}

impl Lu {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        Self::factor_with_tol(m, pivot_tolerance(m))
    }

    /// Factors with an explicit pivot threshold; pivots with magnitude at or
    /// below `tol` raise [`Error::SingularMatrix`].
    pub fn factor_with_tol(m: &DenseMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= tol {
                return Err(Error::SingularMatrix { step: k, pivot, tol });
            }
            min_pivot = min_pivot.min(pivot);
            lu.swap_rows(k, p);
            perm.swap(k, p);

            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        Ok(Self { lu, perm, min_pivot })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Smallest pivot magnitude met during elimination.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, expected {n}",
                rhs.len()
            )));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Solves `M X = B` column by column.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, expected {}",
                b.rows(),
                self.dim()
            )));
        }
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let col: Vec<f64> = (0..b.rows()).map(|i| b[(i, j)]).collect();
            for (i, v) in self.solve(&col)?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve_matrix(&DenseMatrix::identity(self.dim()))
            .expect("identity has matching dimension")
    }
}

/// Solves the square system `M x = rhs` with partial pivoting.
pub fn lu_solve(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, expected {}",
            rhs.len(),
            m.rows()
        )));
    }
    Lu::factor(m)?.solve(rhs)
}

/// Determinant by Gaussian elimination. Never fails on singular input;
/// returns 0 when a column has no nonzero pivot.
pub fn determinant(m: &DenseMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "determinant needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[(x, k)].abs().total_cmp(&a[(y, k)].abs()))
            .unwrap_or(k);
        if a[(p, k)] == 0.0 {
            return Ok(0.0);
        }
        if p != k {
            a.swap_rows(k, p);
            det = -det;
        }
        let d = a[(k, k)];
        det *= d;
        for i in k + 1..n {
            let f = a[(i, k)] / d;
            for j in k + 1..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_diagonal_and_permutation_systems() {
        assert_eq!(
            lu_solve(&DenseMatrix::identity(3), &[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(
            lu_solve(&m(&[&[2.0, 0.0], &[0.0, 4.0]]), &[2.0, 8.0]).unwrap(),
            vec![1.0, 2.0]
        );
        assert_eq!(
            lu_solve(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), &[5.0, 7.0]).unwrap(),
            vec![7.0, 5.0]
        );
    }

    #[test]
    fn singular_and_malformed_inputs() {
        let s = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(lu_solve(&s, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
        assert!(matches!(
            lu_solve(&DenseMatrix::zeros(2, 2), &[0.0, 0.0]),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(matches!(
            lu_solve(&DenseMatrix::identity(2), &[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(Lu::factor(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[4.0, 3.0, 0.0], &[6.0, 3.0, 1.0], &[0.0, 2.0, 5.0]]);
        // 4(15-2) - 3(30-0) + 0 = -38
        assert!((determinant(&a).unwrap() + 38.0).abs() < 1e-12);
        assert_eq!(determinant(&m(&[&[1.0, 2.0], &[2.0, 4.0]])).unwrap(), 0.0);
        let inv = Lu::factor(&a).unwrap().inverse();
        let prod = &a * &inv;
        assert!((&prod - &DenseMatrix::identity(3)).max_abs() < 1e-14);
    }
}
