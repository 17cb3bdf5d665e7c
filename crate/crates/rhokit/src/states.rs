//! Density matrices, ensembles that realize them, and observables.
//!
//! The density matrix is taken as the fundamental description of a system;
//! state vectors only appear inside ensembles and purifications. Ensembles
//! that average to the same density matrix are physically indistinguishable,
//! and the tests lean on that repeatedly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, tensor_product, CMatrix};

/// Validation tolerance for Hermiticity / trace / positivity of states.
pub const STATE_TOL: f64 = 1e-10;

/// Positive-semidefinite, unit-trace, Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate and wrap: Hermitian to 1e-10, trace 1 to 1e-10, smallest
    /// eigenvalue at least -1e-10.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                got: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        matrix.require_hermitian(STATE_TOL)?;
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::ProbabilitySum(tr.re));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -STATE_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Pure state |psi><psi| from a unit column.
    pub fn pure(psi: &CMatrix) -> Result<Self> {
        if psi.cols() != 1 {
            return Err(Error::DimensionMismatch {
                expected: "column vector".into(),
                got: format!("{}x{}", psi.rows(), psi.cols()),
            });
        }
        let n = psi.norm();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidInput(format!("state norm {n} is not 1")));
        }
        DensityMatrix::new(psi.matmul(&psi.dagger()))
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(d).scale_re(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Hermitian observable.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                got: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        matrix.require_hermitian(STATE_TOL)?;
        Ok(Observable { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Finite ensemble of pure states with probabilities.
#[derive(Clone, Debug)]
pub struct Ensemble {
    entries: Vec<(f64, CMatrix)>,
    dim: usize,
}

impl Ensemble {
    /// Validate probabilities (each in (0, 1], summing to 1 within 1e-8) and
    /// state normalization (unit to 1e-10).
    pub fn new(entries: Vec<(f64, CMatrix)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty ensemble".into()));
        }
        let dim = entries[0].1.rows();
        let mut total = 0.0;
        for (p, psi) in &entries {
            if psi.cols() != 1 || psi.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("{dim}x1 column"),
                    got: format!("{}x{}", psi.rows(), psi.cols()),
                });
            }
            if !(*p > 0.0 && *p <= 1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!("probability {p} out of range")));
            }
            let n = psi.norm();
            if (n - 1.0).abs() > STATE_TOL {
                return Err(Error::InvalidInput(format!("state norm {n} is not 1")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::ProbabilitySum(total));
        }
        Ok(Ensemble { entries, dim })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(f64, CMatrix)] {
        &self.entries
    }
}

/// Average an ensemble into its density matrix: rho = sum_r P_r psi_r psi_r†.
pub fn from_ensemble(ensemble: &Ensemble) -> Result<DensityMatrix> {
    let d = ensemble.dim();
    let mut rho = CMatrix::zeros(d, d);
    for (p, psi) in ensemble.entries() {
        rho = &rho + &psi.matmul(&psi.dagger()).scale_re(*p);
    }
    DensityMatrix::new(rho)
}

/// Expectation value Tr(A rho); the imaginary part must vanish to 1e-10.
pub fn expectation(observable: &Observable, rho: &DensityMatrix) -> Result<f64> {
    if observable.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", rho.dim()),
            got: format!("dimension {}", observable.dim()),
        });
    }
    let val = observable.matrix().matmul(rho.matrix()).trace();
    assert!(
        val.im.abs() <= 1e-10,
        "expectation of Hermitian pair came out complex: {val}"
    );
    Ok(val.re)
}

/// If `rho` is an eigenstate of the observable's action (A rho = alpha rho),
/// return the definite value alpha = Tr(A rho); otherwise `None`.
pub fn definite_value_check(observable: &Observable, rho: &DensityMatrix) -> Result<Option<f64>> {
    let alpha = expectation(observable, rho)?;
    let lhs = observable.matrix().matmul(rho.matrix());
    let rhs = rho.matrix().scale_re(alpha);
    if lhs.max_abs_diff(&rhs) <= 1e-8 {
        Ok(Some(alpha))
    } else {
        Ok(None)
    }
}

/// Purify an ensemble: Psi = sum_r sqrt(P_r) psi_r (x) e_r, a column of
/// length d * k with the system index major. Tracing out the ancilla factor
/// recovers the ensemble average.
pub fn purify_with_ensemble(ensemble: &Ensemble) -> CMatrix {
    let d = ensemble.dim();
    let k = ensemble.len();
    let mut psi = CMatrix::zeros(d * k, 1);
    for (r, (p, state)) in ensemble.entries().iter().enumerate() {
        let anc = CMatrix::basis_column(k, r);
        let term = tensor_product(state, &anc).scale_re(p.sqrt());
        psi = &psi + &term;
    }
    psi
}

/// Unit spin state with Bloch vector `n` (unit 3-vector), using the
/// convention e_0 = spin up along +z: psi = (cos(theta/2), e^{i phi} sin(theta/2)).
pub fn spin_state(n: [f64; 3]) -> CMatrix {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let (x, y, z) = (n[0] / norm, n[1] / norm, n[2] / norm);
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    CMatrix::column(&[
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
}

/// Density matrix (I + r . sigma)/2 for a Bloch vector with |r| <= 1.
pub fn bloch_density(r: [f64; 3]) -> Result<DensityMatrix> {
    let m = CMatrix::from_rows(&[
        vec![Complex64::new(1.0 + r[2], 0.0), Complex64::new(r[0], -r[1])],
        vec![Complex64::new(r[0], r[1]), Complex64::new(1.0 - r[2], 0.0)],
    ])
    .scale_re(0.5);
    DensityMatrix::new(m)
}

/// 75/25 mixture of spins pointing northeast and southwest in the x-z plane.
/// Its average is close to (but not exactly) that of
/// [`three_element_spin_ensemble`]; the two agree after rounding to four
/// decimals.
pub fn two_element_spin_ensemble() -> Ensemble {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ensemble::new(vec![
        (0.75, spin_state([s, 0.0, s])),
        (0.25, spin_state([-s, 0.0, -s])),
    ])
    .expect("valid by construction")
}

/// 50/15/35 mixture of spins pointing north, south, and east. The average
/// is exactly [[0.675, 0.175], [0.175, 0.325]].
pub fn three_element_spin_ensemble() -> Ensemble {
    Ensemble::new(vec![
        (0.50, spin_state([0.0, 0.0, 1.0])),
        (0.15, spin_state([0.0, 0.0, -1.0])),
        (0.35, spin_state([1.0, 0.0, 0.0])),
    ])
    .expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, random_unit_column, rng_from_seed};
    use crate::linalg::{hermitian_eigen, partial_trace, TraceSide};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn two_element_spin_mixture_matches_bloch_oracle() {
        // oracle: r = 0.5 * (1, 0, 1)/sqrt(2), rho = (I + r.sigma)/2
        let rho = from_ensemble(&two_element_spin_ensemble()).unwrap();
        let oracle = bloch_density([0.5 * FRAC_1_SQRT_2, 0.0, 0.5 * FRAC_1_SQRT_2]).unwrap();
        assert!(rho.matrix().max_abs_diff(oracle.matrix()) < 1e-14);
        // frozen values: [[0.6768, 0.1768], [0.1768, 0.3232]] to 5e-4
        assert!((rho.matrix()[(0, 0)].re - 0.6768).abs() < 5e-4);
        assert!((rho.matrix()[(0, 1)].re - 0.1768).abs() < 5e-4);
        assert!((rho.matrix()[(1, 1)].re - 0.3232).abs() < 5e-4);
    }

    #[test]
    fn three_element_spin_mixture_is_exact() {
        let rho = from_ensemble(&three_element_spin_ensemble()).unwrap();
        let expect = CMatrix::from_real_rows(&[vec![0.675, 0.175], vec![0.175, 0.325]]);
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn the_two_spin_mixtures_nearly_agree() {
        // distinct preparations, nearly the same density matrix
        let a = from_ensemble(&two_element_spin_ensemble()).unwrap();
        let b = from_ensemble(&three_element_spin_ensemble()).unwrap();
        let gap = a.matrix().max_abs_diff(b.matrix());
        assert!(gap > 1e-4, "mixtures should differ slightly, gap={gap}");
        assert!(gap < 2e-2, "mixtures should agree to rounding, gap={gap}");
    }

    #[test]
    fn ensemble_probability_validation() {
        let up = spin_state([0.0, 0.0, 1.0]);
        let dn = spin_state([0.0, 0.0, -1.0]);
        let bad = Ensemble::new(vec![(0.8, up.clone()), (0.3, dn.clone())]);
        assert!(matches!(bad, Err(Error::ProbabilitySum(_))));
        let unnormalized = Ensemble::new(vec![(1.0, up.scale_re(2.0))]);
        assert!(unnormalized.is_err());
        assert!(Ensemble::new(vec![(0.8, up), (0.2, dn)]).is_ok());
    }

    #[test]
    fn density_matrix_rejects_bad_input() {
        let neg = CMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(Error::NotPositive(_))
        ));
        let off_trace = CMatrix::diag_real(&[0.7, 0.7]);
        assert!(matches!(
            DensityMatrix::new(off_trace),
            Err(Error::ProbabilitySum(_))
        ));
        let skew = CMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, 0.0)],
            vec![c(0.3, 0.0), c(0.5, 0.0)],
        ]);
        assert!(matches!(
            DensityMatrix::new(skew),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn expectation_of_projector_is_eigenvalue() {
        let mut rng = rng_from_seed(101);
        let rho = DensityMatrix::new(random_density(4, &mut rng)).unwrap();
        let eig = hermitian_eigen(rho.matrix()).unwrap();
        let top = eig.vector(0);
        let proj = Observable::new(top.matmul(&top.dagger())).unwrap();
        let val = expectation(&proj, &rho).unwrap();
        assert!((val - eig.values[0]).abs() < 1e-12);
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let mut rng = rng_from_seed(103);
        for d in 2..=5 {
            let rho = DensityMatrix::new(random_density(d, &mut rng)).unwrap();
            let eye = Observable::new(CMatrix::identity(d)).unwrap();
            assert!((expectation(&eye, &rho).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn definite_values_only_on_eigenstates() {
        // sigma_z on |0><0| has definite value +1
        let sz = Observable::new(CMatrix::diag_real(&[1.0, -1.0])).unwrap();
        let up = DensityMatrix::pure(&CMatrix::basis_column(2, 0)).unwrap();
        assert_eq!(definite_value_check(&sz, &up).unwrap(), Some(1.0));
        // maximally mixed state: sigma_z rho = sigma_z/2 != 0 = alpha rho
        let mixed = DensityMatrix::new(CMatrix::diag_real(&[0.5, 0.5])).unwrap();
        assert_eq!(definite_value_check(&sz, &mixed).unwrap(), None);
        // superposition is not an eigenstate
        let plus = DensityMatrix::pure(&CMatrix::column(&[
            c(FRAC_1_SQRT_2, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
        ]))
        .unwrap();
        assert_eq!(definite_value_check(&sz, &plus).unwrap(), None);
    }

    #[test]
    fn purification_traces_back_to_the_average() {
        let e = three_element_spin_ensemble();
        let psi = purify_with_ensemble(&e);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let full = psi.matmul(&psi.dagger());
        let reduced = partial_trace(&full, TraceSide::Second, e.dim(), e.len());
        let rho = from_ensemble(&e).unwrap();
        assert!(reduced.max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn purification_of_random_ensembles() {
        let mut rng = rng_from_seed(107);
        for trial in 0..20 {
            let d = 2 + trial % 3;
            let k = 2 + trial % 4;
            let probs = crate::linalg::random::random_simplex(k, &mut rng);
            let entries: Vec<(f64, CMatrix)> = probs
                .into_iter()
                .map(|p| (p, random_unit_column(d, &mut rng)))
                .collect();
            let e = Ensemble::new(entries).unwrap();
            let psi = purify_with_ensemble(&e);
            let reduced = partial_trace(&psi.matmul(&psi.dagger()), TraceSide::Second, d, k);
            assert!(reduced.max_abs_diff(from_ensemble(&e).unwrap().matrix()) < 1e-12);
        }
    }

    #[test]
    fn spin_states_point_where_asked() {
        // <sigma . n> = 1 on the matching spin state
        let directions = [
            [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2],
            [-FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
        ];
        for n in directions {
            let psi = spin_state(n);
            let rho = DensityMatrix::pure(&psi).unwrap();
            let pauli = CMatrix::from_rows(&[
                vec![c(n[2], 0.0), c(n[0], -n[1])],
                vec![c(n[0], n[1]), c(-n[2], 0.0)],
            ]);
            let obs = Observable::new(pauli).unwrap();
            assert!((expectation(&obs, &rho).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
