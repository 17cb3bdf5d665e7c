//! Hermitian eigensolver (cyclic complex Jacobi) and matrix functions built on it.
//!
//! Jacobi is slower than Householder tridiagonalization but is simple,
//! numerically robust, and fully deterministic for a given input, which the
//! byte-identical CLI output relies on. Sizes here never exceed 256 x 256.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` are real and sorted in descending order; column `k` of `vectors`
/// is the orthonormal eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// V diag(values) V†, for residual checks.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| {
            self.vectors[(i, j)] * Complex64::new(self.values[j], 0.0)
        });
        scaled.matmul(&self.vectors.dagger())
    }

    /// Eigenvector for `values[k]` as a column.
    pub fn vector(&self, k: usize) -> CMatrix {
        self.vectors.column_at(k)
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("empty decomposition")
    }

    pub fn max(&self) -> f64 {
        *self.values.first().expect("empty decomposition")
    }
}

/// Tolerance on the Hermiticity residual accepted by [`hermitian_eigen`].
pub const HERMITICITY_INPUT_TOL: f64 = 1e-10;

/// Diagonalize a Hermitian matrix.
///
/// The input must be Hermitian to within `1e-10` (entrywise); the
/// strictly-Hermitian average (A + A†)/2 is what actually gets diagonalized.
/// Eigenvalues come back in descending order. The reconstruction residual
/// max|V diag V† - A| is below `1e-10 * max(1, max|A|)` for well-scaled input.
pub fn hermitian_eigen(a: &CMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    a.require_hermitian(HERMITICITY_INPUT_TOL)?;
    let n = a.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }

    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = 1.0 + m.frobenius_norm();

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m[(i, i)].re, i)).collect();
    // stable descending sort keeps degenerate blocks in sweep order
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("NaN eigenvalue"));

    let values: Vec<f64> = pairs.iter().map(|&(val, _)| val).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, pairs[k].1)]);
    Ok(EigenDecomposition { values, vectors })
}

/// One Jacobi rotation zeroing the (p, q) entry of the Hermitian matrix `m`,
/// accumulated into `v`.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = m.rows();
    let b = m[(p, q)];
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let phase = b / babs; // e^{i arg b}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * babs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = phase * (t * c); // complex rotation s = e^{i arg b} * sigma

    // A <- G† A G with G[p,p]=c, G[p,q]=s, G[q,p]=-conj(s), G[q,q]=c.
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - akq * s.conj();
        m[(k, q)] = akp * s + akq * c;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c - aqk * s;
        m[(q, k)] = apk * s.conj() + aqk * c;
    }
    // keep the diagonal strictly real and the zeroed pair clean
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s.conj();
        v[(k, q)] = vkp * s + vkq * c;
    }
}

/// Apply a real function to the spectrum: V diag(f(lambda)) V†.
pub fn hermitian_map(h: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(h)?;
    let n = eig.values.len();
    let scaled = CMatrix::from_fn(n, n, |i, j| {
        eig.vectors[(i, j)] * Complex64::new(f(eig.values[j]), 0.0)
    });
    Ok(scaled.matmul(&eig.vectors.dagger()))
}

/// exp(i theta H) for Hermitian H; always unitary.
pub fn unitary_exp(h: &CMatrix, theta: f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(h)?;
    let n = eig.values.len();
    let scaled = CMatrix::from_fn(n, n, |i, j| {
        eig.vectors[(i, j)] * Complex64::from_polar(1.0, theta * eig.values[j])
    });
    Ok(scaled.matmul(&eig.vectors.dagger()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigen(h)?.min())
}
