//! Dense complex matrices in row-major storage.
//!
//! Everything in this crate is small (dimension at most 16 for operators,
//! 256 for superoperator layouts), so a plain `Vec<Complex64>` with explicit
//! indexing beats any sparse or generic abstraction.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major: entry `(i, j)` lives at `i * cols + j`.
///
/// Column vectors are represented as `cols == 1` matrices.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested row slices of `(re, im)` pairs; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = CMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row {i}");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Real matrix from nested `f64` rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        CMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Square diagonal matrix from its diagonal entries.
    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag_real(entries: &[f64]) -> Self {
        let v: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMatrix::diag(&v)
    }

    /// Column vector with a single 1 at `index`.
    pub fn basis_column(n: usize, index: usize) -> Self {
        let mut m = CMatrix::zeros(n, 1);
        m[(index, 0)] = Complex64::new(1.0, 0.0);
        m
    }

    /// Column vector from a slice.
    pub fn column(entries: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(entries.len(), 1);
        for (i, v) in entries.iter().enumerate() {
            m[(i, 0)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Raw row-major data.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose.
    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    /// Scale by a complex factor.
    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * factor)
    }

    /// Scale by a real factor.
    pub fn scale_re(&self, factor: f64) -> CMatrix {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max_ij |A_ij - conj(A_ji)|; zero iff Hermitian.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Fails with [`Error::NotHermitian`] when the residual exceeds `tol`.
    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let r = self.hermiticity_residual();
        if r > tol {
            Err(Error::NotHermitian(r))
        } else {
            Ok(())
        }
    }

    /// max |A†A - I|; zero iff unitary.
    pub fn unitarity_residual(&self) -> f64 {
        assert!(self.is_square());
        let prod = self.dagger().matmul(self);
        prod.max_abs_diff(&CMatrix::identity(self.rows))
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> CMatrix {
        (self + &self.dagger()).scale_re(0.5)
    }

    /// Matrix product.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self * other * self_adjoint_of(other_side)`, i.e. A B A†.
    pub fn sandwich(&self, inner: &CMatrix) -> CMatrix {
        self.matmul(inner).matmul(&self.dagger())
    }

    /// Inner product `<self, other> = Tr(self† other)`; for columns this is
    /// the usual vector inner product.
    pub fn inner(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Flatten row-major into a column vector of length rows*cols.
    pub fn vec(&self) -> CMatrix {
        CMatrix {
            rows: self.rows * self.cols,
            cols: 1,
            data: self.data.clone(),
        }
    }

    /// Inverse of [`CMatrix::vec`]: reshape a column of length r*c.
    pub fn unvec(column: &CMatrix, rows: usize, cols: usize) -> CMatrix {
        assert_eq!(column.cols, 1, "unvec expects a column");
        assert_eq!(column.rows, rows * cols, "unvec length mismatch");
        CMatrix {
            rows,
            cols,
            data: column.data.clone(),
        }
    }

    /// Extract column `j` as a column vector.
    pub fn column_at(&self, j: usize) -> CMatrix {
        CMatrix::from_fn(self.rows, 1, |i, _| self[(i, j)])
    }

    /// Euclidean norm of a column vector (Frobenius norm in general).
    pub fn norm(&self) -> f64 {
        self.frobenius_norm()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, other: &CMatrix) -> CMatrix {
        self.matmul(other)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Commutator [A, B].
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &a.matmul(b) - &b.matmul(a)
}

/// Anticommutator {A, B}.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &a.matmul(b) + &b.matmul(a)
}

/// Row-major pair flattening: `(p, q) -> p*d + q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlattenConvention {
    pub d: usize,
}

impl FlattenConvention {
    pub fn new(d: usize) -> Self {
        FlattenConvention { d }
    }

    pub fn flatten(&self, p: usize, q: usize) -> usize {
        debug_assert!(p < self.d && q < self.d);
        p * self.d + q
    }

    pub fn unflatten(&self, idx: usize) -> (usize, usize) {
        debug_assert!(idx < self.d * self.d);
        (idx / self.d, idx % self.d)
    }
}

/// Kronecker product with the left factor major:
/// `(A ⊗ B)[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Which tensor factor [`partial_trace`] removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceSide {
    /// Trace out the left (major) factor, leaving a d2 x d2 matrix.
    First,
    /// Trace out the right (minor) factor, leaving a d1 x d1 matrix.
    Second,
}

/// Partial trace of a (d1*d2) x (d1*d2) matrix over one factor.
pub fn partial_trace(m: &CMatrix, side: TraceSide, d1: usize, d2: usize) -> CMatrix {
    assert_eq!(m.rows(), d1 * d2, "partial_trace dimension mismatch");
    assert!(m.is_square());
    match side {
        TraceSide::First => CMatrix::from_fn(d2, d2, |k, l| {
            (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum()
        }),
        TraceSide::Second => CMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
    }
}

/// Kernel-style outer product of two d x d matrices.
///
/// Produces the d^2 x d^2 array with entries
/// `out[(mp*d + m), (np*d + n)] = A[mp, m] * B[n, np]`
/// (note the transposed index order on the second factor). Applied to a
/// density matrix through the kernel contraction this acts as rho -> A rho B.
pub fn kernel_outer(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert!(a.is_square() && b.is_square());
    assert_eq!(a.rows(), b.rows());
    let d = a.rows();
    let mut out = CMatrix::zeros(d * d, d * d);
    for mp in 0..d {
        for m in 0..d {
            let left = a[(mp, m)];
            if left == Complex64::new(0.0, 0.0) {
                continue;
            }
            for np in 0..d {
                for n in 0..d {
                    out[(mp * d + m, np * d + n)] = left * b[(n, np)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flatten_round_trip_all_dims() {
        for d in 1..=16 {
            let f = FlattenConvention::new(d);
            for p in 0..d {
                for q in 0..d {
                    assert_eq!(f.unflatten(f.flatten(p, q)), (p, q));
                }
            }
            for idx in 0..d * d {
                let (p, q) = f.unflatten(idx);
                assert_eq!(f.flatten(p, q), idx);
            }
        }
    }

    #[test]
    fn tensor_product_layout_is_left_major() {
        // spot value: [A (x) B][(i*rB+k),(j*cB+l)] = A[i,j] B[k,l]
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ]);
        let b = CMatrix::from_rows(&[
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(4.0, 0.0)],
        ]);
        let t = tensor_product(&a, &b);
        assert_eq!(t.rows(), 4);
        assert_eq!(t[(0, 0)], c(3.0, 0.0));
        assert_eq!(t[(1, 1)], c(4.0, 0.0));
        assert_eq!(t[(0, 2)], c(6.0, 0.0));
        assert_eq!(t[(2, 0)], c(0.0, 3.0));
        assert_eq!(t[(3, 3)], c(0.0, 0.0));
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 0.2)],
            vec![c(0.5, -0.2), c(2.0, 0.0)],
        ]);
        let b = CMatrix::from_rows(&[
            vec![c(0.3, 0.0), c(0.0, 0.1), c(0.0, 0.0)],
            vec![c(0.0, -0.1), c(0.7, 0.0), c(0.2, 0.0)],
            vec![c(0.0, 0.0), c(0.2, 0.0), c(1.1, 0.0)],
        ]);
        let t = tensor_product(&a, &b);
        let tr_b = partial_trace(&t, TraceSide::Second, 2, 3);
        let tr_a = partial_trace(&t, TraceSide::First, 2, 3);
        // Tr_II(A (x) B) = A * Tr(B), Tr_I(A (x) B) = B * Tr(A)
        assert!(tr_b.max_abs_diff(&a.scale(b.trace())) < 1e-14);
        assert!(tr_a.max_abs_diff(&b.scale(a.trace())) < 1e-14);
    }

    #[test]
    fn bell_projector_partial_traces_are_maximally_mixed() {
        // |phi+> = (|00> + |11>)/sqrt(2)
        let mut psi = CMatrix::zeros(4, 1);
        psi[(0, 0)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[(3, 0)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let proj = psi.matmul(&psi.dagger());
        let half_eye = CMatrix::identity(2).scale_re(0.5);
        assert!(partial_trace(&proj, TraceSide::First, 2, 2).max_abs_diff(&half_eye) < 1e-15);
        assert!(partial_trace(&proj, TraceSide::Second, 2, 2).max_abs_diff(&half_eye) < 1e-15);
    }

    #[test]
    fn dagger_and_inner_products() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.0, -1.0)],
            vec![c(3.0, 0.0), c(0.0, 0.0)],
        ]);
        let ad = a.dagger();
        assert_eq!(ad[(0, 0)], c(1.0, -2.0));
        assert_eq!(ad[(1, 0)], c(0.0, 1.0));
        let v = CMatrix::column(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(v.inner(&v), c(2.0, 0.0));
    }

    #[test]
    fn hermiticity_residual_detects_asymmetry() {
        let h = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ]);
        assert_eq!(h.hermiticity_residual(), 0.0);
        let g = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(2.0, 0.0)],
        ]);
        assert!(g.hermiticity_residual() > 1.9);
    }

    #[test]
    fn kernel_outer_entry_placement() {
        let d = 2;
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 0.0), c(4.0, 0.0)],
        ]);
        let b = CMatrix::from_rows(&[
            vec![c(5.0, 0.0), c(6.0, 0.0)],
            vec![c(7.0, 0.0), c(8.0, 0.0)],
        ]);
        let k = kernel_outer(&a, &b);
        for mp in 0..d {
            for m in 0..d {
                for np in 0..d {
                    for n in 0..d {
                        assert_eq!(k[(mp * d + m, np * d + n)], a[(mp, m)] * b[(n, np)]);
                    }
                }
            }
        }
    }

    #[test]
    fn vec_unvec_round_trip() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, 4.0)],
            vec![c(5.0, 6.0), c(7.0, 8.0)],
        ]);
        let v = a.vec();
        assert_eq!(v[(1, 0)], c(3.0, 4.0)); // row-major: (0,1) -> slot 1
        let back = CMatrix::unvec(&v, 2, 2);
        assert_eq!(back, a);
    }
}
