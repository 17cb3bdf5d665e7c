//! Seeded sampling of matrices, states, and unitaries.
//!
//! Everything is driven by a single `u64` seed through ChaCha8, so any
//! consumer (tests, CLI demos, sampled checks) is reproducible bit-for-bit.
//! Per-trial generators are derived with [`rng_for_trial`], which keeps
//! results independent of how trials are scheduled.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::CMatrix;

/// Root generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for trial `index` under the same seed.
pub fn rng_for_trial(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Standard complex normal: re and im each N(0, 1).
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// d x d matrix of standard complex normals.
pub fn random_matrix(d: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| complex_normal(rng))
}

/// Random Hermitian sample G + G†.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = random_matrix(d, rng);
    &g + &g.dagger()
}

/// Random column vector normalized to unit length.
pub fn random_unit_column(d: usize, rng: &mut impl Rng) -> CMatrix {
    loop {
        let v = CMatrix::from_fn(d, 1, |_, _| complex_normal(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v.scale_re(1.0 / n);
        }
    }
}

/// Full-rank random density matrix W W† / Tr(W W†).
pub fn random_density(d: usize, rng: &mut impl Rng) -> CMatrix {
    random_density_rank(d, d, rng)
}

/// Random density matrix of rank at most `rank`.
pub fn random_density_rank(d: usize, rank: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(rank >= 1 && rank <= d);
    let w = CMatrix::from_fn(d, rank, |_, _| complex_normal(rng));
    let m = w.matmul(&w.dagger());
    let tr = m.trace().re;
    m.scale_re(1.0 / tr)
}

/// Random density matrix of rank d-1 annihilating the given unit vector:
/// rho v = 0 while rho stays positive on the orthogonal complement.
pub fn random_density_with_null_vector(v: &CMatrix, rng: &mut impl Rng) -> CMatrix {
    let d = v.rows();
    assert!(d >= 2, "need dimension >= 2 for a rank-deficient state");
    let basis = complete_basis(v);
    // random positive weights on the complement coordinates
    let w = CMatrix::from_fn(d - 1, d - 1, |_, _| complex_normal(rng));
    // columns 1.. of `basis` span the complement of v
    let compl = CMatrix::from_fn(d, d - 1, |i, j| basis[(i, j + 1)]);
    let mixed = compl.matmul(&w.matmul(&w.dagger())).matmul(&compl.dagger());
    let tr = mixed.trace().re;
    mixed.scale_re(1.0 / tr)
}

/// Orthonormal basis whose first column is the given unit vector
/// (Gram-Schmidt against standard basis vectors, repeated for stability).
pub fn complete_basis(v: &CMatrix) -> CMatrix {
    let d = v.rows();
    let mut cols: Vec<CMatrix> = vec![v.scale_re(1.0 / v.norm())];
    let mut e = 0usize;
    while cols.len() < d {
        let mut cand = CMatrix::basis_column(d, e);
        e += 1;
        for _ in 0..2 {
            for c in &cols {
                let overlap = c.inner(&cand);
                cand = &cand - &c.scale(overlap);
            }
        }
        let n = cand.norm();
        if n > 1e-8 {
            cols.push(cand.scale_re(1.0 / n));
        }
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][(i, 0)])
}

/// Haar-distributed random unitary (QR of a complex Ginibre matrix with the
/// R diagonal kept positive).
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    loop {
        let g = random_matrix(d, rng);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

/// Random special unitary: Haar unitary with the determinant phase removed.
pub fn random_special_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let u = random_unitary(d, rng);
    let det = determinant(&u);
    let phase = det / det.norm();
    // divide one d-th of the phase out of every column
    let correction = Complex64::from_polar(1.0, -phase.arg() / d as f64);
    u.scale(correction)
}

/// Modified Gram-Schmidt with one reorthogonalization pass; `None` when the
/// input is numerically rank-deficient.
fn gram_schmidt(m: &CMatrix) -> Option<CMatrix> {
    let d = m.rows();
    let mut cols: Vec<CMatrix> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = m.column_at(j);
        for _ in 0..2 {
            for c in &cols {
                let overlap = c.inner(&v);
                v = &v - &c.scale(overlap);
            }
        }
        let n = v.norm();
        if n < 1e-10 {
            return None;
        }
        cols.push(v.scale_re(1.0 / n));
    }
    Some(CMatrix::from_fn(d, d, |i, j| cols[j][(i, 0)]))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &CMatrix) -> Complex64 {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot = k;
        for i in k + 1..n {
            if a[(i, k)].norm() > a[(pivot, k)].norm() {
                pivot = i;
            }
        }
        if a[(pivot, k)].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        det *= a[(k, k)];
        for i in k + 1..n {
            let factor = a[(i, k)] / a[(k, k)];
            for j in k..n {
                let sub = factor * a[(k, j)];
                a[(i, j)] -= sub;
            }
        }
    }
    det
}

/// Random mutually-orthonormal traceless matrices under the trace inner
/// product Tr(u† v); the raw material for noise directions.
pub fn random_traceless_orthonormal(d: usize, count: usize, rng: &mut impl Rng) -> Vec<CMatrix> {
    assert!(count < d * d, "at most d^2 - 1 traceless directions exist");
    let mut out: Vec<CMatrix> = Vec::with_capacity(count);
    while out.len() < count {
        let g = random_matrix(d, rng);
        let tr = g.trace() / Complex64::new(d as f64, 0.0);
        let mut cand = &g - &CMatrix::identity(d).scale(tr);
        for _ in 0..2 {
            for u in &out {
                let overlap = u.inner(&cand);
                cand = &cand - &u.scale(overlap);
            }
        }
        let n = cand.frobenius_norm();
        if n > 1e-8 {
            out.push(cand.scale_re(1.0 / n));
        }
    }
    out
}

/// Uniform point on the probability simplex, via normalized exponentials.
pub fn random_simplex(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.gen_range(1e-12..1.0);
            -u.ln()
        })
        .collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}
