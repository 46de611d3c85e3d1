//! Column-stacking `vec`, Kronecker products and the commutation matrices
//! `P_mn` characterised by `vec(A) = P_mn vec(A^T)` for `A` of size `m x n`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Stacks the columns of `m` top to bottom.
pub fn vec(m: &DenseMatrix) -> Vec<f64> {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    for j in 0..cols {
        for i in 0..rows {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec`] for an `m x n` target.
pub fn unvec(v: &[f64], m: usize, n: usize) -> Result<DenseMatrix> {
    if v.len() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "cannot unvec length {} into {m}x{n}",
            v.len()
        )));
    }
    Ok(DenseMatrix::from_fn(m, n, |i, j| v[i + j * m]))
}

/// Kronecker product: the `(i, j)` block of the result is `a[i, j] * b`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = b.shape();
    DenseMatrix::from_fn(a.rows() * p, a.cols() * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

/// The commutation matrix `P_mn` held as an index permutation.
///
/// `sigma[src] = dst` means `(P v)[dst] = v[src]`. Source index `i*n + j`
/// (entry `(j, i)` of `A^T`, i.e. `a_ij`) is sent to `j*m + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMap {
    m: usize,
    n: usize,
    sigma: Vec<usize>,
}

impl PermutationMap {
    /// Builds `P_mn`. Dimensions of zero give the empty map.
    pub fn new(m: usize, n: usize) -> Self {
        let mut sigma = vec![0; m * n];
        for i in 0..m {
            for j in 0..n {
                sigma[i * n + j] = j * m + i;
            }
        }
        Self { m, n, sigma }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `P_mn^T`, which is `P_nm`.
    pub fn transpose(&self) -> Self {
        let mut sigma = vec![0; self.sigma.len()];
        for (src, &dst) in self.sigma.iter().enumerate() {
            sigma[dst] = src;
        }
        Self {
            m: self.n,
            n: self.m,
            sigma,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(k, &s)| k == s)
    }

    /// `P v`. Pure data movement.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "P_{}{} needs a vector of length {}, got {}",
                self.m,
                self.n,
                self.len(),
                v.len()
            )));
        }
        let mut out = vec![0.0; v.len()];
        for (src, &dst) in self.sigma.iter().enumerate() {
            out[dst] = v[src];
        }
        Ok(out)
    }

    /// `P M`, permuting the rows of `M`.
    pub fn permute_rows(&self, mat: &DenseMatrix) -> Result<DenseMatrix> {
        if mat.rows() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "P_{}{} cannot act on {} rows",
                self.m,
                self.n,
                mat.rows()
            )));
        }
        let mut src_of = vec![0; self.len()];
        for (src, &dst) in self.sigma.iter().enumerate() {
            src_of[dst] = src;
        }
        Ok(DenseMatrix::from_fn(mat.rows(), mat.cols(), |r, c| mat[(src_of[r], c)]))
    }

    /// `M P^T`, permuting the columns of `M` (column `src` moves to `sigma[src]`).
    pub fn permute_cols_transposed(&self, mat: &DenseMatrix) -> Result<DenseMatrix> {
        if mat.cols() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "P_{}{}^T cannot act on {} columns",
                self.m,
                self.n,
                mat.cols()
            )));
        }
        let mut src_of = vec![0; self.len()];
        for (src, &dst) in self.sigma.iter().enumerate() {
            src_of[dst] = src;
        }
        Ok(DenseMatrix::from_fn(mat.rows(), mat.cols(), |r, c| mat[(r, src_of[c])]))
    }

    /// Explicit 0/1 matrix with `P[sigma[k], k] = 1`.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.len(), self.len());
        for (src, &dst) in self.sigma.iter().enumerate() {
            out[(dst, src)] = 1.0;
        }
        out
    }

    /// Composition `self * other` as maps (apply `other` first).
    pub fn compose(&self, other: &PermutationMap) -> Result<Vec<usize>> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose permutations of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(other.sigma.iter().map(|&mid| self.sigma[mid]).collect())
    }
}

/// `P_mn` built from its defining stack of `I_m (x) e_in^T` blocks.
pub fn perm_build(m: usize, n: usize) -> PermutationMap {
    PermutationMap::new(m, n)
}

pub fn perm_apply(p: &PermutationMap, v: &[f64]) -> Result<Vec<f64>> {
    p.apply(v)
}

pub fn perm_dense(p: &PermutationMap) -> DenseMatrix {
    p.to_dense()
}
