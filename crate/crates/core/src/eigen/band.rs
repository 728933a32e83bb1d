//! Symmetric banded storage with an in-place LDL^T factorization.
//!
//! Row i stores columns [i-b, i] contiguously, so the factorization inner
//! loops run over contiguous slices. No pivoting: for shifted Dirichlet
//! operators the factorization either completes or hits a pivot that is
//! numerically zero, which is reported as a breakdown so the caller can
//! perturb the shift. The inertia (count of negative pivots) equals the
//! number of eigenvalues below the shift by Sylvester's law.

use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::scalar::Real;

pub struct BandMatrix<F> {
    pub n: usize,
    pub b: usize,
    /// n rows of length b+1; entry (i, j) with i-b <= j <= i lives at
    /// data[i*(b+1) + (b - (i - j))].
    data: Vec<F>,
    factored: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Inertia {
    pub negative: usize,
    pub positive: usize,
}

impl<F: Real> BandMatrix<F> {
    /// Lays out A - shift*I in band storage.
    pub fn from_operator(op: &SparseOperator<F>, shift: F) -> Self {
        let n = op.n;
        let b = op.bandwidth();
        let w = b + 1;
        let mut data = vec![F::zero(); n * w];
        for i in 0..n {
            let (cols, vals) = op.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = c as usize;
                if j <= i {
                    let v = if j == i { v - shift } else { v };
                    data[i * w + (b - (i - j))] = v;
                }
            }
        }
        BandMatrix {
            n,
            b,
            data,
            factored: false,
        }
    }

    /// In-place LDL^T. Returns the inertia of the factored matrix.
    pub fn factorize(&mut self, shift_for_report: f64) -> Result<Inertia> {
        assert!(!self.factored);
        let n = self.n;
        let b = self.b;
        let w = b + 1;
        // Breakdown scale: largest diagonal magnitude of the input.
        let mut scale = F::zero();
        for i in 0..n {
            let d = self.data[i * w + b].abs();
            if d > scale {
                scale = d;
            }
        }
        if scale == F::zero() {
            scale = F::one();
        }
        let tiny = F::of(1e-12) * scale;

        let mut inertia = Inertia::default();
        let mut col = vec![F::zero(); b + 1];
        for j in 0..n {
            let d = self.data[j * w + b];
            if d.abs() <= tiny {
                return Err(Error::FactorizationBreakdown {
                    shift: shift_for_report,
                    pivot: d.to_f64_lossy(),
                });
            }
            if d < F::zero() {
                inertia.negative += 1;
            } else {
                inertia.positive += 1;
            }
            let jmax = (j + b).min(n - 1);
            // Copy column j below the diagonal before it is overwritten.
            for i in j + 1..=jmax {
                col[i - j] = self.data[i * w + (b - (i - j))];
            }
            for i in j + 1..=jmax {
                let aij = col[i - j];
                if aij == F::zero() {
                    continue;
                }
                let lij = aij / d;
                // Row i, columns j+1..=i: contiguous slice ending at the diagonal.
                let lo = i * w + (b - (i - j - 1));
                let row = &mut self.data[lo..=i * w + b];
                for (k, rk) in row.iter_mut().enumerate() {
                    *rk -= lij * col[k + 1];
                }
                self.data[i * w + (b - (i - j))] = lij;
            }
        }
        self.factored = true;
        Ok(inertia)
    }

    /// Solves L D L^T x = rhs in place. Requires a prior `factorize`.
    pub fn solve(&self, x: &mut [F]) {
        assert!(self.factored);
        let n = self.n;
        let b = self.b;
        let w = b + 1;
        // Forward: L z = rhs.
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut acc = x[i];
            let row = &self.data[i * w + (b - (i - lo))..i * w + b];
            for (k, &l) in row.iter().enumerate() {
                acc -= l * x[lo + k];
            }
            x[i] = acc;
        }
        // Diagonal.
        for i in 0..n {
            x[i] /= self.data[i * w + b];
        }
        // Backward: L^T y = z.
        for i in (0..n).rev() {
            let jmax = (i + b).min(n - 1);
            let mut acc = x[i];
            for j in i + 1..=jmax {
                acc -= self.data[j * w + (b - (j - i))] * x[j];
            }
            x[i] = acc;
        }
    }
}
