#![allow(dead_code, clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsylv::{ComplexScalar, DenseMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    let dist = Uniform::new_inclusive(-1.0, 1.0).unwrap();
    let data = (0..rows * cols).map(|_| dist.sample(rng)).collect();
    DenseMatrix::from_row_major(rows, cols, data).unwrap()
}

/// Proptest strategy for a `rows x cols` matrix with entries in `[-1, 1]`.
pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-1.0..=1.0f64, rows * cols)
        .prop_map(move |d| DenseMatrix::from_row_major(rows, cols, d).unwrap())
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let d = a.try_sub(b).unwrap().frobenius_norm();
    d / a.frobenius_norm().max(b.frobenius_norm()).max(1.0)
}

/// Column-stacking by the index formula, independent of the library's `vec`.
pub fn vec_by_index(m: &DenseMatrix) -> Vec<f64> {
    let (r, c) = m.shape();
    (0..r * c).map(|k| m[(k % r, k / r)]).collect()
}

/// Kronecker product by the block definition.
pub fn kron_by_index(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = b.shape();
    let (r, c) = (a.rows() * p, a.cols() * q);
    let data = (0..r * c).map(|k| {
        let (i, j) = (k / c, k % c);
        a[(i / p, j / q)] * b[(i % p, j % q)]
    });
    DenseMatrix::from_row_major(r, c, data.collect()).unwrap()
}

/// Determinant by Gaussian elimination with full pivoting.
pub fn det_full_pivot(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = 1.0;
    for k in 0..n {
        let (mut pi, mut pj) = (k, k);
        for i in k..n {
            for j in k..n {
                if a[i][j].abs() > a[pi][pj].abs() {
                    (pi, pj) = (i, j);
                }
            }
        }
        if a[pi][pj] == 0.0 {
            return 0.0;
        }
        if pi != k {
            a.swap(pi, k);
            det = -det;
        }
        if pj != k {
            for row in a.iter_mut() {
                row.swap(pj, k);
            }
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Smallest achievable maximum pairing distance between two equal-size
/// multisets (bottleneck assignment by subset DP).
pub fn bottleneck_match(a: &[ComplexScalar], b: &[ComplexScalar]) -> f64 {
    let n = a.len();
    assert_eq!(n, b.len());
    assert!(n <= 16);
    let mut best = vec![f64::INFINITY; 1 << n];
    best[0] = 0.0;
    for mask in 0usize..(1 << n) {
        let i = mask.count_ones() as usize;
        if i >= n || best[mask].is_infinite() {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let cost = best[mask].max((a[i] - b[j]).modulus());
                let next = mask | (1 << j);
                if cost < best[next] {
                    best[next] = cost;
                }
            }
        }
    }
    best[(1 << n) - 1]
}
