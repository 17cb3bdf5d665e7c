//! Stock kernels: the identity, the transpose map, unitary conjugations,
//! Kraus-built channels, two textbook noise channels, and a three-level
//! symmetry that mixes off-diagonal entries directly.

use num_complex::Complex64;
use rand::Rng;

use super::Kernel;
use crate::error::{Error, Result};
use crate::linalg::random::{determinant, random_simplex};
use crate::linalg::{kernel_outer, CMatrix};

/// Identity kernel K_{M'M,N'N} = delta_{M'M} delta_{N'N}.
pub fn identity_kernel(d: usize) -> Result<Kernel> {
    let eye = CMatrix::identity(d);
    Kernel::from_choi(d, kernel_outer(&eye, &eye))
}

/// Transpose kernel K_{M'M,N'N} = delta_{M'N} delta_{N'M}; positive on
/// single-system states but famously not completely positive.
pub fn transpose_kernel(d: usize) -> Result<Kernel> {
    let mut choi = CMatrix::zeros(d * d, d * d);
    for mp in 0..d {
        for m in 0..d {
            choi[(mp * d + m, m * d + mp)] = Complex64::new(1.0, 0.0);
        }
    }
    Kernel::from_choi(d, choi)
}

/// Conjugation kernel rho -> U rho U†.
pub fn unitary_kernel(u: &CMatrix) -> Result<Kernel> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    let residual = u.unitarity_residual();
    if residual > 1e-8 {
        return Err(Error::NotUnitary(residual));
    }
    Kernel::from_choi(u.rows(), kernel_outer(u, &u.dagger()))
}

/// Channel built from explicit Kraus operators: choi = sum_i vec(A_i) vec(A_i)†.
pub fn kraus_kernel(ops: &[CMatrix]) -> Result<Kernel> {
    if ops.is_empty() {
        return Err(Error::InvalidInput("no Kraus operators given".into()));
    }
    let d = ops[0].rows();
    for a in ops {
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                got: format!("{}x{}", a.rows(), a.cols()),
            });
        }
    }
    let mut choi = CMatrix::zeros(d * d, d * d);
    for a in ops {
        choi = &choi + &kernel_outer(a, &a.dagger());
    }
    Kernel::from_choi(d, choi)
}

/// Depolarizing channel rho -> (1-p) rho + p Tr(rho) I/d.
pub fn depolarizing_kernel(d: usize, p: f64) -> Result<Kernel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "mixing weight {p} outside [0, 1]"
        )));
    }
    let eye = CMatrix::identity(d);
    let mut choi = kernel_outer(&eye, &eye).scale_re(1.0 - p);
    for mp in 0..d {
        for m in 0..d {
            choi[(mp * d + m, mp * d + m)] += Complex64::new(p / d as f64, 0.0);
        }
    }
    Kernel::from_choi(d, choi)
}

/// Qubit dephasing rho -> (1-p) rho + p sigma_z rho sigma_z.
pub fn dephasing_kernel(p: f64) -> Result<Kernel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "mixing weight {p} outside [0, 1]"
        )));
    }
    let sz = CMatrix::diag_real(&[1.0, -1.0]);
    kraus_kernel(&[
        CMatrix::identity(2).scale_re((1.0 - p).sqrt()),
        sz.scale_re(p.sqrt()),
    ])
}

/// Row/column positions of the independent off-diagonal entries (b_1, b_2,
/// b_3) in the three-level layout used by [`su3_example_kernel`].
pub const SU3_B_POSITIONS: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

/// Assemble the three-level density-matrix layout
///
/// ```text
/// [ a_1        b_3        conj(b_2) ]
/// [ conj(b_3)  a_2        b_1       ]
/// [ b_2        conj(b_1)  a_3       ]
/// ```
pub fn su3_pack(a: [f64; 3], b: [Complex64; 3]) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    for (i, ai) in a.iter().enumerate() {
        m[(i, i)] = Complex64::new(*ai, 0.0);
    }
    for (j, (r, c)) in SU3_B_POSITIONS.iter().enumerate() {
        m[(*r, *c)] = b[j];
        m[(*c, *r)] = b[j].conj();
    }
    m
}

/// Read the diagonal and the b-triplet back out of the three-level layout.
pub fn su3_unpack(m: &CMatrix) -> ([f64; 3], [Complex64; 3]) {
    let a = [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re];
    let mut b = [Complex64::new(0.0, 0.0); 3];
    for (j, (r, c)) in SU3_B_POSITIONS.iter().enumerate() {
        b[j] = m[(*r, *c)];
    }
    (a, b)
}

/// Kernel that fixes the diagonal of the three-level layout and rotates the
/// b-triplet by a special-unitary matrix: b -> U b (conjugate entries follow
/// by Hermiticity). A symmetry of density matrices that is not a conjugation:
/// away from diagonal U it is not even completely positive.
pub fn su3_example_kernel(u: &CMatrix) -> Result<Kernel> {
    if u.rows() != 3 || u.cols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: "3x3".into(),
            got: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    let residual = u.unitarity_residual();
    if residual > 1e-8 {
        return Err(Error::NotUnitary(residual));
    }
    let det_dev = (determinant(u) - Complex64::new(1.0, 0.0)).norm();
    if det_dev > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "determinant differs from 1 by {det_dev:.3e}"
        )));
    }
    let d = 3;
    let mut choi = CMatrix::zeros(9, 9);
    // diagonal entries are held fixed
    for i in 0..3 {
        choi[(i * d + i, i * d + i)] = Complex64::new(1.0, 0.0);
    }
    // b_j' = sum_k U_jk b_k and the conjugate sector demanded by Hermiticity
    for j in 0..3 {
        let (rj, cj) = SU3_B_POSITIONS[j];
        for k in 0..3 {
            let (rk, ck) = SU3_B_POSITIONS[k];
            choi[(rj * d + rk, cj * d + ck)] = u[(j, k)];
            choi[(cj * d + ck, rj * d + rk)] = u[(j, k)].conj();
        }
    }
    Kernel::from_choi(d, choi)
}

/// Bound on |b|^2 inside the invariant positive class: |b_1|^2 + |b_2|^2 +
/// |b_3|^2 <= a_1 a_2 a_3 / 4.
pub fn su3_class_bound(a: [f64; 3]) -> f64 {
    0.25 * a[0] * a[1] * a[2]
}

/// Sample a member of the invariant class: a uniform diagonal simplex point
/// and a b-triplet drawn inside the allowed ball. Every member is a valid
/// density matrix.
pub fn su3_class_sample(rng: &mut impl Rng) -> CMatrix {
    let a_vec = random_simplex(3, rng);
    let a = [a_vec[0], a_vec[1], a_vec[2]];
    let bound = su3_class_bound(a);
    let mut dir = [Complex64::new(0.0, 0.0); 3];
    let mut norm_sq = 0.0;
    for slot in &mut dir {
        let z = crate::linalg::random::complex_normal(rng);
        norm_sq += z.norm_sqr();
        *slot = z;
    }
    let fill: f64 = rng.gen_range(0.0..1.0);
    let scale = (fill * bound / norm_sq).sqrt();
    let b = [dir[0] * scale, dir[1] * scale, dir[2] * scale];
    su3_pack(a, b)
}
