//! LU factorization with partial pivoting, for the few places that need a
//! general (non-Hermitian) linear solve or an explicit inverse.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// LU factorization P A = L U of a square complex matrix.
pub struct Lu {
    n: usize,
    /// packed L (unit diagonal, below) and U (on and above)
    lu: CMatrix,
    perm: Vec<usize>,
}

/// Factor `a`; fails with [`Error::SingularKernel`] on a vanishing pivot.
pub fn lu_factor(a: &CMatrix) -> Result<Lu> {
    assert!(a.is_square());
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = 1.0 + a.max_abs();

    for k in 0..n {
        let mut pivot = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let mag = lu[(i, k)].norm();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        if best <= 1e-14 * scale {
            return Err(Error::SingularKernel);
        }
        if pivot != k {
            perm.swap(pivot, k);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
        }
        let diag = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / diag;
            lu[(i, k)] = factor;
            for j in k + 1..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok(Lu { n, lu, perm })
}

impl Lu {
    /// Solve A x = b for a column (or multi-column) right-hand side.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        assert_eq!(b.rows(), self.n);
        let cols = b.cols();
        let mut x = CMatrix::zeros(self.n, cols);
        for c in 0..cols {
            // apply permutation, forward substitution with unit-diagonal L
            let mut y = vec![Complex64::new(0.0, 0.0); self.n];
            for i in 0..self.n {
                let mut acc = b[(self.perm[i], c)];
                for j in 0..i {
                    acc -= self.lu[(i, j)] * y[j];
                }
                y[i] = acc;
            }
            // back substitution with U
            for i in (0..self.n).rev() {
                let mut acc = y[i];
                for j in i + 1..self.n {
                    acc -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = acc / self.lu[(i, i)];
            }
        }
        x
    }

    /// Explicit inverse (n solves against the identity).
    pub fn inverse(&self) -> CMatrix {
        self.solve(&CMatrix::identity(self.n))
    }
}

/// Frobenius-norm condition estimate ||A|| * ||A^-1||.
pub fn condition_estimate(a: &CMatrix) -> Result<f64> {
    let lu = lu_factor(a)?;
    Ok(a.frobenius_norm() * lu.inverse().frobenius_norm())
}
