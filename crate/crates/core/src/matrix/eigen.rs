use super::{ComplexScalar, DenseMatrix};
use crate::error::{Error, Result};

/// Total QR sweep budget for a matrix of dimension `dim`.
pub fn max_eig_iterations(dim: usize) -> usize {
    100 * dim.max(1)
}

/// All eigenvalues of a real square matrix, with multiplicity. Complex
/// eigenvalues come out as adjacent conjugate pairs, positive imaginary part
/// first.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<ComplexScalar>> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues need a non-empty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut h = m.clone();
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(h)
}

/// Householder similarity reduction to upper Hessenberg form, in place.
fn reduce_to_hessenberg(a: &mut DenseMatrix) {
    let n = a.rows();
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        // v = x - alpha e1, H = I - 2 v v^T / (v^T v)
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vtv: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;

        // Left: rows k+1.., all columns from k.
        for j in k..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum::<f64>() * beta;
            for i in k + 1..n {
                a[(i, j)] -= s * v[i];
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let s: f64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum::<f64>() * beta;
            for j in k + 1..n {
                a[(i, j)] -= s * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only),
/// with exceptional shifts after 10 and 30 stagnant sweeps.
fn hessenberg_qr(mut h: DenseMatrix) -> Result<Vec<ComplexScalar>> {
    let nn = h.rows();
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];
    let eps = f64::EPSILON;
    let budget = max_eig_iterations(nn);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }
    if norm == 0.0 {
        return Ok(vec![ComplexScalar::default(); nn]);
    }

    let low: isize = 0;
    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total = 0usize;
    let (mut p, mut q, mut r): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut s, mut z): (f64, f64);
    let (mut w, mut x, mut y);

    macro_rules! at {
        ($i:expr, $j:expr) => {
            h[(($i) as usize, ($j) as usize)]
        };
    }

    while n >= low {
        // Find the lowest negligible subdiagonal entry.
        let mut l = n;
        while l > low {
            s = at!(l - 1, l - 1).abs() + at!(l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            let sub = at!(l, l - 1).abs();
            if sub == 0.0 || sub < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One root.
            at!(n, n) += exshift;
            wr[n as usize] = at!(n, n);
            wi[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // Two roots from the trailing 2x2 block.
            w = at!(n, n - 1) * at!(n - 1, n);
            p = (at!(n - 1, n - 1) - at!(n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            at!(n, n) += exshift;
            at!(n - 1, n - 1) += exshift;
            x = at!(n, n);
            let (a, b) = ((n - 1) as usize, n as usize);
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                wr[a] = x + z;
                wr[b] = if z != 0.0 { x - w / z } else { wr[a] };
                wi[a] = 0.0;
                wi[b] = 0.0;
            } else {
                wr[a] = x + p;
                wr[b] = x + p;
                wi[a] = z;
                wi[b] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = at!(n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = at!(n - 1, n - 1);
                w = at!(n, n - 1) * at!(n - 1, n);
            }
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    at!(i, i) -= x;
                }
                s = at!(n, n - 1).abs() + at!(n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        at!(i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total += 1;
            if total > budget {
                return Err(Error::NoConvergence { iterations: budget });
            }

            // Look for two consecutive small subdiagonal entries.
            let mut m = n - 2;
            while m >= l {
                z = at!(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / at!(m + 1, m) + at!(m, m + 1);
                q = at!(m + 1, m + 1) - z - r - s;
                r = at!(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let lhs = at!(m, m - 1).abs() * (q.abs() + r.abs());
                let rhs = eps * (p.abs() * (at!(m - 1, m - 1).abs() + z.abs() + at!(m + 1, m + 1).abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=n {
                at!(i, i - 2) = 0.0;
                if i > m + 2 {
                    at!(i, i - 3) = 0.0;
                }
            }

            // Double QR step on rows l..=n, columns m..=n.
            let mut k = m;
            while k < n {
                let notlast = k != n - 1;
                if k != m {
                    p = at!(k, k - 1);
                    q = at!(k + 1, k - 1);
                    r = if notlast { at!(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        at!(k, k - 1) = -s * x;
                    } else if l != m {
                        at!(k, k - 1) = -at!(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..=n {
                        p = at!(k, j) + q * at!(k + 1, j);
                        if notlast {
                            p += r * at!(k + 2, j);
                            at!(k + 2, j) -= p * z;
                        }
                        at!(k, j) -= p * x;
                        at!(k + 1, j) -= p * y;
                    }
                    let top = n.min(k + 3);
                    for i in l..=top {
                        p = x * at!(i, k) + y * at!(i, k + 1);
                        if notlast {
                            p += z * at!(i, k + 2);
                            at!(i, k + 2) -= p * r;
                        }
                        at!(i, k) -= p;
                        at!(i, k + 1) -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| ComplexScalar::new(re, im))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<ComplexScalar>) -> Vec<ComplexScalar> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn close(a: ComplexScalar, b: ComplexScalar, tol: f64) -> bool {
        (a - b).modulus() <= tol
    }

    #[test]
    fn diagonal() {
        let m = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 3.0]]).unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!(close(ev[0], ComplexScalar::real(2.0), 1e-14));
        assert!(close(ev[1], ComplexScalar::real(3.0), 1e-14));
    }

    #[test]
    fn rotation_gives_conjugate_pair() {
        let m = DenseMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!(close(ev[0], ComplexScalar::new(0.0, -1.0), 1e-14));
        assert!(close(ev[1], ComplexScalar::new(0.0, 1.0), 1e-14));
    }

    #[test]
    fn rank_one_triangular() {
        // lambda^2 - 0.5 lambda = 0
        let m = DenseMatrix::from_rows(&[[0.5, 0.5], [0.0, 0.0]]).unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!(close(ev[0], ComplexScalar::real(0.0), 1e-14));
        assert!(close(ev[1], ComplexScalar::real(0.5), 1e-14));
    }

    #[test]
    fn companion_matrix_roots() {
        // (x-1)(x-2)(x-3)(x-4) = x^4 - 10x^3 + 35x^2 - 50x + 24
        let m = DenseMatrix::from_rows(&[
            [10.0, -35.0, 50.0, -24.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let ev = sorted(eigenvalues(&m).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!(close(*e, ComplexScalar::real(k as f64 + 1.0), 1e-9), "{e}");
        }
    }

    #[test]
    fn zero_and_scalar_matrices() {
        assert_eq!(
            eigenvalues(&DenseMatrix::zeros(3, 3)).unwrap(),
            vec![ComplexScalar::default(); 3]
        );
        assert_eq!(
            eigenvalues(&DenseMatrix::from_rows(&[[-4.5]]).unwrap()).unwrap(),
            vec![ComplexScalar::real(-4.5)]
        );
        assert!(eigenvalues(&DenseMatrix::zeros(2, 3)).is_err());
        assert!(eigenvalues(&DenseMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn nilpotent_shift_matrix() {
        let mut m = DenseMatrix::zeros(4, 4);
        for i in 0..3 {
            m[(i, i + 1)] = 1.0;
        }
        for e in eigenvalues(&m).unwrap() {
            assert!(e.modulus() < 1e-12);
        }
    }
}
