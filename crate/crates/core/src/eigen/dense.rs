//! Dense symmetric eigensolver (cyclic Jacobi). Used for small operators and
//! for the projected matrices produced by the Lanczos iteration.

use crate::scalar::Real;

/// Eigen-decomposes a dense symmetric matrix, ascending eigenvalues.
/// `a` is row-major n x n and is destroyed. Returns (values, vectors) with
/// vectors[k] the unit eigenvector for values[k].
pub fn jacobi_eigh<F: Real>(a: &mut [F], n: usize) -> (Vec<F>, Vec<Vec<F>>) {
    assert_eq!(a.len(), n * n);
    let mut v = vec![F::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = F::one();
    }
    if n == 0 {
        return (Vec::new(), Vec::new());
    }

    let eps = F::of(1e-14);
    let mut norm = F::zero();
    for i in 0..n {
        for j in 0..n {
            norm += a[i * n + j] * a[i * n + j];
        }
    }
    norm = norm.sqrt();
    if norm == F::zero() {
        norm = F::one();
    }

    for _sweep in 0..60 {
        let mut off = F::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() <= eps * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == F::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (F::of(2.0) * apq);
                let t = {
                    let s = if theta >= F::zero() {
                        F::one()
                    } else {
                        -F::one()
                    };
                    s / (theta.abs() + (F::one() + theta * theta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;
                // Rotate rows/cols p and q.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .partial_cmp(&a[j * n + j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<F> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<F>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let mut a = vec![2.0f64, 1.0, 1.0, 2.0];
        let (vals, vecs) = jacobi_eigh(&mut a, 2);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        // Eigenvector of 1 is (1,-1)/sqrt(2) up to sign.
        assert!((vecs[0][0] + vecs[0][1]).abs() < 1e-10);
    }

    #[test]
    fn tridiagonal_toeplitz_matches_closed_form() {
        // -1/2/-1 Toeplitz of size n: eigenvalues 2 - 2 cos(k pi / (n+1)).
        let n = 12;
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = -1.0;
                a[(i + 1) * n + i] = -1.0;
            }
        }
        let (vals, _) = jacobi_eigh(&mut a, n);
        for (k, &lam) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((lam - exact).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let n = 8;
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 1.0 / (1.0 + (i as f64 - j as f64).abs());
            }
        }
        let (_, vecs) = jacobi_eigh(&mut a, n);
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| vecs[i][k] * vecs[j][k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }
}
