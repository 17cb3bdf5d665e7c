//! Symmetry kernels on density matrices.
//!
//! A kernel is the four-index array `K_{M'M,N'N}` acting entrywise,
//!
//! ```text
//! g(rho)_{M'N'} = sum_{M,N} K_{M'M,N'N} rho_{MN}
//! ```
//!
//! stored here in two interchangeable d^2 x d^2 layouts:
//!
//! - **choi**: row `(M'*d + M)`, column `(N'*d + N)`. Hermiticity preservation
//!   of the map is exactly Hermiticity of this matrix, so its real spectrum
//!   and orthonormal eigenmatrices are the map's invariant content.
//! - **transfer**: row `(M'*d + N')`, column `(M*d + N)`. Acting on row-major
//!   flattened matrices this is the map itself, so composition of maps is a
//!   matrix product.
//!
//! The two differ by an index reshuffle, performed exactly (no arithmetic).

mod builtin;
mod factorized;

pub use builtin::{
    dephasing_kernel, depolarizing_kernel, identity_kernel, kraus_kernel, su3_class_bound,
    su3_class_sample, su3_example_kernel, su3_pack, su3_unpack, transpose_kernel, unitary_kernel,
    SU3_B_POSITIONS,
};
pub use factorized::{
    kernel_factor_product, reduced_action, FactorizedKernel, ReducedActionReport,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::random::{
    random_density, random_density_with_null_vector, random_unit_column, rng_for_trial,
    rng_from_seed,
};
use crate::linalg::{hermitian_eigen, kernel_outer, lu_factor, partial_trace, CMatrix, TraceSide};
use crate::states::Observable;

/// Pass/fail tolerance for validation flags and sampled checks.
pub const PASS_TOL: f64 = 1e-8;
/// Tolerance for structural identities (reconstructions, round trips).
pub const STRUCT_TOL: f64 = 1e-10;
/// Negative kernel eigenvalues in [-KRAUS_CLAMP, 0) are clamped to zero when
/// extracting Kraus operators.
pub const KRAUS_CLAMP: f64 = 1e-8;

/// Exact reshuffle between the choi and transfer layouts (an involution):
/// `out[(a*d + c), (b*d + e)] = m[(a*d + b), (c*d + e)]`.
fn reshuffle(m: &CMatrix, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    out[(a * d + c, b * d + e)] = m[(a * d + b, c * d + e)];
                }
            }
        }
    }
    out
}

/// A symmetry kernel on d x d density matrices, stored in the choi layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    d: usize,
    choi: CMatrix,
}

/// Residuals of the two defining constraints, with pass flags at 1e-8.
#[derive(Clone, Copy, Debug)]
pub struct ValidationReport {
    /// max |K*_{M'M,N'N} - K_{N'N,M'M}| (Hermiticity preservation)
    pub hermiticity_residual: f64,
    /// max |sum_{M'} K_{M'M,M'N} - delta_{MN}| (trace preservation)
    pub trace_residual: f64,
    pub hermiticity_pass: bool,
    pub trace_pass: bool,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.hermiticity_pass && self.trace_pass
    }
}

/// Spectral form of a kernel: K = sum_i eta_i u_i (x) u_i†, with real eta in
/// descending order and eigenmatrices orthonormal under Tr(u† v).
#[derive(Clone, Debug)]
pub struct KernelSpectrum {
    pub etas: Vec<f64>,
    pub eigenmatrices: Vec<CMatrix>,
}

impl KernelSpectrum {
    /// Apply through the spectral form: sum_i eta_i u_i rho u_i†.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.eigenmatrices[0].rows();
        let mut out = CMatrix::zeros(d, d);
        for (eta, u) in self.etas.iter().zip(&self.eigenmatrices) {
            out = &out + &u.sandwich(rho).scale_re(*eta);
        }
        out
    }

    /// Rebuild the choi layout as sum_i eta_i u_i (x) u_i†.
    pub fn reconstruct_choi(&self) -> CMatrix {
        let d = self.eigenmatrices[0].rows();
        let mut out = CMatrix::zeros(d * d, d * d);
        for (eta, u) in self.etas.iter().zip(&self.eigenmatrices) {
            out = &out + &kernel_outer(u, &u.dagger()).scale_re(*eta);
        }
        out
    }

    /// Residual of the trace-preservation identity sum_i eta_i u_i† u_i = I.
    pub fn trace_identity_residual(&self) -> f64 {
        let d = self.eigenmatrices[0].rows();
        let mut acc = CMatrix::zeros(d, d);
        for (eta, u) in self.etas.iter().zip(&self.eigenmatrices) {
            acc = &acc + &u.dagger().matmul(u).scale_re(*eta);
        }
        acc.max_abs_diff(&CMatrix::identity(d))
    }

    pub fn min_eta(&self) -> f64 {
        self.etas.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Kraus operators of a completely positive kernel.
#[derive(Clone, Debug)]
pub struct KrausSet {
    pub ops: Vec<CMatrix>,
}

impl KrausSet {
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.ops[0].rows();
        let mut out = CMatrix::zeros(d, d);
        for a in &self.ops {
            out = &out + &a.sandwich(rho);
        }
        out
    }

    /// Residual of the completeness relation sum_i A_i† A_i = I.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.ops[0].rows();
        let mut acc = CMatrix::zeros(d, d);
        for a in &self.ops {
            acc = &acc + &a.dagger().matmul(a);
        }
        acc.max_abs_diff(&CMatrix::identity(d))
    }

    pub fn rank(&self) -> usize {
        self.ops.len()
    }
}

/// Outcome of a sampled positivity search.
#[derive(Clone, Debug)]
pub struct PositivitySampleReport {
    /// true when no sampled state maps below -1e-8
    pub positive: bool,
    /// most negative output eigenvalue seen
    pub worst_min_eigenvalue: f64,
    /// first state whose image dipped below -1e-8, with its image eigenvalue
    pub witness: Option<(CMatrix, f64)>,
    pub trials: usize,
}

/// Observable pulled back through the inverse-adjoint transfer action,
/// together with the transfer matrix's condition estimate.
#[derive(Clone, Debug)]
pub struct PullbackReport {
    pub observable: Observable,
    pub condition: f64,
}

impl Kernel {
    /// Wrap a choi-layout matrix; only the size is checked here, use
    /// [`Kernel::validate`] for the physical constraints.
    pub fn from_choi(d: usize, choi: CMatrix) -> Result<Self> {
        if choi.rows() != d * d || choi.cols() != d * d {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", d * d),
                got: format!("{}x{}", choi.rows(), choi.cols()),
            });
        }
        Ok(Kernel { d, choi })
    }

    /// Wrap a transfer-layout matrix (reshuffled into choi storage).
    pub fn from_transfer(d: usize, transfer: CMatrix) -> Result<Self> {
        if transfer.rows() != d * d || transfer.cols() != d * d {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", d * d),
                got: format!("{}x{}", transfer.rows(), transfer.cols()),
            });
        }
        Ok(Kernel {
            d,
            choi: reshuffle(&transfer, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn transfer(&self) -> CMatrix {
        reshuffle(&self.choi, self.d)
    }

    /// Four-index entry K_{M'M,N'N}.
    pub fn entry(&self, mp: usize, m: usize, np: usize, n: usize) -> Complex64 {
        self.choi[(mp * self.d + m, np * self.d + n)]
    }

    /// Act on a matrix: g(rho)_{M'N'} = sum_{MN} K_{M'M,N'N} rho_{MN}.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let d = self.d;
        if rho.rows() != d || rho.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                got: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let mut out = CMatrix::zeros(d, d);
        for mp in 0..d {
            for np in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..d {
                    for n in 0..d {
                        acc += self.choi[(mp * d + m, np * d + n)] * rho[(m, n)];
                    }
                }
                out[(mp, np)] = acc;
            }
        }
        Ok(out)
    }

    /// Composite map "self after other": transfer matrices multiply.
    pub fn compose(&self, other: &Kernel) -> Result<Kernel> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: format!("dimension {}", self.d),
                got: format!("dimension {}", other.d),
            });
        }
        let s = self.transfer().matmul(&other.transfer());
        Kernel::from_transfer(self.d, s)
    }

    /// Residuals of Hermiticity preservation and trace preservation.
    pub fn validate(&self) -> ValidationReport {
        let hermiticity_residual = self.choi.hermiticity_residual();
        let traced = partial_trace(&self.choi, TraceSide::First, self.d, self.d);
        let trace_residual = traced.max_abs_diff(&CMatrix::identity(self.d));
        ValidationReport {
            hermiticity_residual,
            trace_residual,
            hermiticity_pass: hermiticity_residual <= PASS_TOL,
            trace_pass: trace_residual <= PASS_TOL,
        }
    }

    /// Max deviation from the identity kernel.
    pub fn identity_residual(&self) -> f64 {
        self.choi
            .max_abs_diff(&identity_kernel(self.d).expect("valid dim").choi)
    }

    /// Diagonalize the choi layout into eigenvalues and eigenmatrices.
    ///
    /// Requires the kernel to preserve Hermiticity (choi Hermitian to 1e-10).
    /// Eigenvalues come back descending; eigenmatrices are the row-major
    /// reshaped eigenvectors, orthonormal under the trace inner product.
    pub fn spectrum(&self) -> Result<KernelSpectrum> {
        let eig = hermitian_eigen(&self.choi)?;
        let d = self.d;
        let eigenmatrices = (0..d * d)
            .map(|k| CMatrix::unvec(&eig.vector(k), d, d))
            .collect();
        Ok(KernelSpectrum {
            etas: eig.values,
            eigenmatrices,
        })
    }

    /// Kernel eigenvalue sign test: `(all eta >= -1e-8, min eta)`.
    pub fn is_completely_positive(&self) -> Result<(bool, f64)> {
        let spec = self.spectrum()?;
        let min = spec.min_eta();
        Ok((min >= -PASS_TOL, min))
    }

    /// Kraus form A_i = sqrt(eta_i) u_i, defined only when every eigenvalue
    /// is nonnegative; values in [-1e-8, 0) are clamped to zero and dropped.
    pub fn to_kraus(&self) -> Result<KrausSet> {
        let spec = self.spectrum()?;
        let min = spec.min_eta();
        if min < -KRAUS_CLAMP {
            return Err(Error::NegativeEigenvalue(min));
        }
        let mut ops = Vec::new();
        for (eta, u) in spec.etas.iter().zip(&spec.eigenmatrices) {
            if *eta > 1e-12 {
                ops.push(u.scale_re(eta.sqrt()));
            }
        }
        Ok(KrausSet { ops })
    }

    /// Search seeded random states (alternating full-rank and rank-deficient,
    /// including states with a prescribed null vector) for one whose image
    /// has an eigenvalue below -1e-8.
    pub fn is_positive_sampled(&self, trials: usize, seed: u64) -> Result<PositivitySampleReport> {
        let d = self.d;
        let mut worst = f64::INFINITY;
        let mut witness = None;
        for trial in 0..trials {
            let mut rng = rng_for_trial(seed, trial as u64);
            let rho = match trial % 3 {
                0 => random_density(d, &mut rng),
                1 => {
                    let v = random_unit_column(d, &mut rng);
                    random_density_with_null_vector(&v, &mut rng)
                }
                _ => {
                    let rank = 1 + (trial / 3) % d;
                    crate::linalg::random::random_density_rank(d, rank, &mut rng)
                }
            };
            let image = self.apply(&rho)?;
            let min = hermitian_eigen(&image.hermitian_part())?.min();
            if min < worst {
                worst = min;
            }
            if min < -PASS_TOL && witness.is_none() {
                witness = Some((rho, min));
                break;
            }
        }
        Ok(PositivitySampleReport {
            positive: witness.is_none(),
            worst_min_eigenvalue: worst,
            witness,
            trials,
        })
    }

    /// Pull an observable back through the map so that expectation values are
    /// preserved: vec(g(A)) = (S†)^{-1} vec(A). The identity
    /// Tr(g(A) g(rho)) = Tr(A rho) is verified on 20 seeded states.
    pub fn observable_pullback(&self, observable: &Observable) -> Result<PullbackReport> {
        let d = self.d;
        if observable.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("dimension {d}"),
                got: format!("dimension {}", observable.dim()),
            });
        }
        let s = self.transfer();
        let s_adj = s.dagger();
        let lu = lu_factor(&s_adj)?;
        let condition = s.frobenius_norm() * lu.inverse().frobenius_norm();
        let pulled_vec = lu.solve(&observable.matrix().vec());
        let pulled = CMatrix::unvec(&pulled_vec, d, d).hermitian_part();
        let result = Observable::new(pulled.clone())?;

        let mut rng = rng_from_seed(0x0b5e_7ab1e);
        for _ in 0..20 {
            let rho = random_density(d, &mut rng);
            let lhs = pulled.matmul(&self.apply(&rho)?).trace();
            let rhs = observable.matrix().matmul(&rho).trace();
            if (lhs - rhs).norm() > PASS_TOL {
                return Err(Error::ContractViolation(format!(
                    "pullback identity residual {:.3e}",
                    (lhs - rhs).norm()
                )));
            }
        }
        Ok(PullbackReport {
            observable: result,
            condition,
        })
    }

    /// Recover the conjugating unitary from an invertible kernel whose
    /// inverse is also completely positive.
    ///
    /// Returns `None` when either kernel has a negative eigenvalue (no
    /// unitary form exists). When both are completely positive the top
    /// eigenmatrix scaled by sqrt(eta_max) must be unitary and reproduce the
    /// map by conjugation; any failure of that contract is an error.
    pub fn unitary_form_test(&self, inverse: &Kernel) -> Result<Option<CMatrix>> {
        let composed = self.compose(inverse)?;
        let inv_residual = composed.identity_residual();
        if inv_residual > PASS_TOL {
            return Err(Error::NotInverse(inv_residual));
        }
        let (cp_fwd, _) = self.is_completely_positive()?;
        let (cp_bwd, _) = inverse.is_completely_positive()?;
        if !cp_fwd || !cp_bwd {
            return Ok(None);
        }
        let spec = self.spectrum()?;
        let eta = spec.etas[0];
        if eta <= 0.0 {
            return Err(Error::ContractViolation(
                "top kernel eigenvalue is not positive".into(),
            ));
        }
        let u = fix_phase(&spec.eigenmatrices[0].scale_re(eta.sqrt()));
        let unit_residual = u.unitarity_residual();
        if unit_residual > PASS_TOL {
            return Err(Error::ContractViolation(format!(
                "extracted matrix is not unitary (residual {unit_residual:.3e})"
            )));
        }
        let mut rng = rng_from_seed(0x0f1e_ce55);
        for _ in 0..20 {
            let rho = random_density(self.d, &mut rng);
            let conj = u.sandwich(&rho);
            let direct = self.apply(&rho)?;
            let dev = conj.max_abs_diff(&direct);
            if dev > PASS_TOL {
                return Err(Error::ContractViolation(format!(
                    "conjugation mismatch {dev:.3e}"
                )));
            }
        }
        Ok(Some(u))
    }

    /// Check that sampled rank-1 projectors stay projectors (idempotent,
    /// unit trace to 1e-8) under the map.
    pub fn check_projector_preserving(&self, trials: usize, seed: u64) -> Result<bool> {
        for trial in 0..trials {
            let mut rng = rng_for_trial(seed, trial as u64);
            let psi = random_unit_column(self.d, &mut rng);
            let proj = psi.matmul(&psi.dagger());
            let image = self.apply(&proj)?;
            let idem = image.matmul(&image).max_abs_diff(&image);
            let tr = (image.trace() - Complex64::new(1.0, 0.0)).norm();
            if idem > PASS_TOL || tr > PASS_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Extend trivially to a composite system: K (x) identity on a d2-dim
    /// ancilla, K_{m'a'ma,n'b'nb} = K_{m'm,n'n} delta_{a'a} delta_{b'b}.
    /// The combined dimension d*d2 must stay at or below 16.
    pub fn extend_with_ancilla(&self, d2: usize) -> Result<Kernel> {
        let d1 = self.d;
        let big = d1 * d2;
        if big > 16 {
            return Err(Error::InvalidInput(format!(
                "combined dimension {big} exceeds the supported limit 16"
            )));
        }
        let mut choi = CMatrix::zeros(big * big, big * big);
        for mp in 0..d1 {
            for m in 0..d1 {
                for np in 0..d1 {
                    for n in 0..d1 {
                        let val = self.choi[(mp * d1 + m, np * d1 + n)];
                        if val == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for a in 0..d2 {
                            for b in 0..d2 {
                                let row = (mp * d2 + a) * big + (m * d2 + a);
                                let col = (np * d2 + b) * big + (n * d2 + b);
                                choi[(row, col)] = val;
                            }
                        }
                    }
                }
            }
        }
        Kernel::from_choi(big, choi)
    }
}

/// Divide out the global phase that makes the largest-modulus entry real
/// positive (first such entry in row-major order on ties).
pub fn fix_phase(m: &CMatrix) -> CMatrix {
    let mut best = (0usize, 0usize);
    let mut best_mag = -1.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let mag = m[(i, j)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = (i, j);
            }
        }
    }
    if best_mag <= 0.0 {
        return m.clone();
    }
    let phase = m[best] / best_mag;
    m.scale(phase.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_unitary, rng_from_seed};
    use crate::linalg::unitary_exp;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_kernel_is_the_delta_pair() {
        let k = identity_kernel(3).unwrap();
        for mp in 0..3 {
            for m in 0..3 {
                for np in 0..3 {
                    for n in 0..3 {
                        let want = if mp == m && np == n { 1.0 } else { 0.0 };
                        assert_eq!(k.entry(mp, m, np, n), c(want, 0.0));
                    }
                }
            }
        }
        let report = k.validate();
        assert_eq!(report.hermiticity_residual, 0.0);
        assert_eq!(report.trace_residual, 0.0);
        // single eigenvalue d with eigenmatrix I/sqrt(d)
        let spec = k.spectrum().unwrap();
        assert!((spec.etas[0] - 3.0).abs() < 1e-12);
        assert!(spec.etas[1].abs() < 1e-12);
        let want = CMatrix::identity(3).scale_re(1.0 / 3f64.sqrt());
        let got = fix_phase(&spec.eigenmatrices[0]);
        assert!(got.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn reshuffle_round_trip() {
        let mut rng = rng_from_seed(211);
        let d = 3;
        let m = crate::linalg::random::random_matrix(d * d, &mut rng);
        let twice = reshuffle(&reshuffle(&m, d), d);
        assert_eq!(twice, m);
    }

    #[test]
    fn transfer_of_unitary_kernel_acts_by_conjugation() {
        let mut rng = rng_from_seed(223);
        for d in 2..=4 {
            let u = random_unitary(d, &mut rng);
            let k = unitary_kernel(&u).unwrap();
            let rho = random_density(d, &mut rng);
            let direct = u.sandwich(&rho);
            // via apply (choi contraction)
            assert!(k.apply(&rho).unwrap().max_abs_diff(&direct) < 1e-12);
            // via transfer on the flattened state
            let out_vec = k.transfer().matmul(&rho.vec());
            let out = CMatrix::unvec(&out_vec, d, d);
            assert!(out.max_abs_diff(&direct) < 1e-12);
            // unitary kernels validate exactly
            assert!(k.validate().pass());
        }
    }

    #[test]
    fn composition_is_transfer_product() {
        let mut rng = rng_from_seed(227);
        let d = 3;
        let u1 = random_unitary(d, &mut rng);
        let u2 = random_unitary(d, &mut rng);
        let k1 = unitary_kernel(&u1).unwrap();
        let k2 = unitary_kernel(&u2).unwrap();
        let composed = k1.compose(&k2).unwrap();
        let direct = unitary_kernel(&u1.matmul(&u2)).unwrap();
        assert!(composed.choi().max_abs_diff(direct.choi()) < 1e-12);
        // action agrees with sequential application
        let rho = random_density(d, &mut rng);
        let a = composed.apply(&rho).unwrap();
        let b = k1.apply(&k2.apply(&rho).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn transpose_kernel_structure() {
        let k = transpose_kernel(2).unwrap();
        let report = k.validate();
        assert!(report.pass());
        // action is the transpose
        let mut rng = rng_from_seed(229);
        let rho = random_density(2, &mut rng);
        assert!(k.apply(&rho).unwrap().max_abs_diff(&rho.transpose()) < 1e-14);
        // eigenvalues +1 (multiplicity 3) and -1 (multiplicity 1)
        let spec = k.spectrum().unwrap();
        let want = [1.0, 1.0, 1.0, -1.0];
        for (eta, w) in spec.etas.iter().zip(want) {
            assert!((eta - w).abs() < 1e-12);
        }
        let (cp, min) = k.is_completely_positive().unwrap();
        assert!(!cp);
        assert!((min + 1.0).abs() < 1e-12);
        assert!(matches!(k.to_kraus(), Err(Error::NegativeEigenvalue(_))));
        // ...but it preserves positivity of unextended states
        let sampled = k.is_positive_sampled(200, 7).unwrap();
        assert!(sampled.positive);
        assert!(sampled.worst_min_eigenvalue > -1e-10);
    }

    #[test]
    fn transpose_eigenvalue_multiplicities_scale_with_dimension() {
        for d in 2..=4 {
            let spec = transpose_kernel(d).unwrap().spectrum().unwrap();
            let plus = spec
                .etas
                .iter()
                .filter(|&&e| (e - 1.0).abs() < 1e-9)
                .count();
            let minus = spec
                .etas
                .iter()
                .filter(|&&e| (e + 1.0).abs() < 1e-9)
                .count();
            assert_eq!(plus, d * (d + 1) / 2);
            assert_eq!(minus, d * (d - 1) / 2);
        }
    }

    #[test]
    fn spectral_and_transfer_application_agree() {
        let mut rng = rng_from_seed(233);
        for d in 2..=4 {
            let u = random_unitary(d, &mut rng);
            let k = unitary_kernel(&u).unwrap();
            let spec = k.spectrum().unwrap();
            let rho = random_density(d, &mut rng);
            assert!(spec.apply(&rho).max_abs_diff(&k.apply(&rho).unwrap()) < 1e-10);
            assert!(spec.reconstruct_choi().max_abs_diff(k.choi()) < 1e-10);
            assert!(spec.trace_identity_residual() < 1e-10);
        }
    }

    #[test]
    fn kraus_round_trip_for_cp_kernels() {
        let k = dephasing_kernel(0.3).unwrap();
        let kraus = k.to_kraus().unwrap();
        assert!(kraus.completeness_residual() < 1e-12);
        let rebuilt = kraus_kernel(&kraus.ops).unwrap();
        assert!(rebuilt.choi().max_abs_diff(k.choi()) < 1e-12);
        let mut rng = rng_from_seed(239);
        let rho = random_density(2, &mut rng);
        assert!(kraus.apply(&rho).max_abs_diff(&k.apply(&rho).unwrap()) < 1e-12);
    }

    #[test]
    fn depolarizing_contracts_toward_the_center() {
        let k = depolarizing_kernel(2, 0.5).unwrap();
        assert!(k.validate().pass());
        let (cp, min) = k.is_completely_positive().unwrap();
        assert!(cp, "depolarizing at p=0.5 is CP, min eta {min}");
        let mut rng = rng_from_seed(241);
        let rho = random_density(2, &mut rng);
        let want = &rho.scale_re(0.5) + &CMatrix::identity(2).scale_re(0.25);
        assert!(k.apply(&rho).unwrap().max_abs_diff(&want) < 1e-12);
        // rank-1 projectors stop being projectors
        assert!(!k.check_projector_preserving(10, 11).unwrap());
        // unitary kernels keep them
        let u = random_unitary(2, &mut rng);
        assert!(unitary_kernel(&u)
            .unwrap()
            .check_projector_preserving(10, 13)
            .unwrap());
    }

    #[test]
    fn unitary_form_recovery() {
        let mut rng = rng_from_seed(251);
        let d = 3;
        let u = random_unitary(d, &mut rng);
        let k = unitary_kernel(&u).unwrap();
        let k_inv = unitary_kernel(&u.dagger()).unwrap();
        let got = k.unitary_form_test(&k_inv).unwrap().expect("unitary form");
        let want = fix_phase(&u);
        assert!(got.max_abs_diff(&want) < 1e-10);
        // transpose kernel is its own inverse but not CP: no unitary form
        let t = transpose_kernel(2).unwrap();
        assert!(t.unitary_form_test(&t).unwrap().is_none());
        // mismatched pair is rejected outright
        let other = unitary_kernel(&random_unitary(d, &mut rng)).unwrap();
        assert!(matches!(
            k.unitary_form_test(&other),
            Err(Error::NotInverse(_))
        ));
    }

    #[test]
    fn observable_pullback_preserves_expectations() {
        let mut rng = rng_from_seed(257);
        let d = 3;
        let u = random_unitary(d, &mut rng);
        let k = unitary_kernel(&u).unwrap();
        let a = Observable::new(crate::linalg::random::random_hermitian(d, &mut rng)).unwrap();
        let pulled = k.observable_pullback(&a).unwrap();
        // expectations stay invariant when the observable co-rotates: U A U†
        let want = u.matmul(a.matrix()).matmul(&u.dagger());
        assert!(pulled.observable.matrix().max_abs_diff(&want) < 1e-9);
        assert!(pulled.condition >= 1.0);
    }

    #[test]
    fn singular_kernel_has_no_pullback() {
        // rho -> I/2 Tr(rho) kills every observable direction but the identity
        let k = depolarizing_kernel(2, 1.0).unwrap();
        let a = Observable::new(CMatrix::diag_real(&[1.0, -1.0])).unwrap();
        assert!(matches!(
            k.observable_pullback(&a),
            Err(Error::SingularKernel)
        ));
    }

    #[test]
    fn ancilla_extension_flips_bell_projector_negative() {
        let t = transpose_kernel(2).unwrap();
        let ext = t.extend_with_ancilla(2).unwrap();
        assert!(ext.validate().pass());
        let mut psi = CMatrix::zeros(4, 1);
        psi[(0, 0)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[(3, 0)] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = psi.matmul(&psi.dagger());
        let image = ext.apply(&bell).unwrap();
        let eig = hermitian_eigen(&image).unwrap();
        assert!((eig.min() + 0.5).abs() < 1e-9);
        // identity extends to identity
        let id = identity_kernel(3).unwrap().extend_with_ancilla(2).unwrap();
        assert!(id.identity_residual() < 1e-14);
    }

    #[test]
    fn extension_dimension_cap() {
        let t = transpose_kernel(4).unwrap();
        assert!(t.extend_with_ancilla(4).is_ok());
        assert!(t.extend_with_ancilla(5).is_err());
    }

    #[test]
    fn phase_fixing_makes_largest_entry_real() {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 2.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.5)],
        ]);
        let fixed = fix_phase(&m);
        assert!((fixed[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exponential_family_stays_consistent() {
        // one-parameter unitary family: kernels compose like the group
        let sz = CMatrix::diag_real(&[0.5, -0.5]);
        let k1 = unitary_kernel(&unitary_exp(&sz, 0.4).unwrap()).unwrap();
        let k2 = unitary_kernel(&unitary_exp(&sz, 1.1).unwrap()).unwrap();
        let k3 = unitary_kernel(&unitary_exp(&sz, 1.5).unwrap()).unwrap();
        assert!(k1.compose(&k2).unwrap().choi().max_abs_diff(k3.choi()) < 1e-12);
    }
}
