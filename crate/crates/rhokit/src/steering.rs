//! Ensemble steering on a purified state.
//!
//! Any mixed state rho admits many pure-state ensembles, and every one of
//! them can be produced from a single entangled pure state by measuring the
//! distant purifying factor: the choice of measurement selects the ensemble,
//! while the local density matrix never changes. This module builds the
//! connecting isometry between two ensembles of the same rho, converts it
//! into a projective ancilla measurement, runs the measurement, and checks
//! the non-signaling statement that the outcome-averaged local state is
//! measurement-independent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_map, partial_trace, CMatrix, TraceSide};
use crate::states::{
    from_ensemble, purify_with_ensemble, three_element_spin_ensemble, two_element_spin_ensemble,
    DensityMatrix, Ensemble,
};

/// Unit-norm tolerance on pure states.
const STATE_TOL: f64 = 1e-10;
/// Measurement structural tolerance (orthogonality, completeness).
const MEAS_TOL: f64 = 1e-10;
/// Agreement required between the two ensembles' averages.
const SHARED_RHO_TOL: f64 = 1e-8;

/// A pure state of a system (dimension `d1`) joined to an ancilla
/// (dimension `d2`), stored as a column with the system index major:
/// component `i * d2 + r` pairs system basis vector `i` with ancilla basis
/// vector `r`.
#[derive(Clone, Debug)]
pub struct BipartitePureState {
    d1: usize,
    d2: usize,
    psi: CMatrix,
}

impl BipartitePureState {
    pub fn new(d1: usize, d2: usize, psi: CMatrix) -> Result<Self> {
        if psi.cols() != 1 || psi.rows() != d1 * d2 {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x1 column", d1 * d2),
                got: format!("{}x{}", psi.rows(), psi.cols()),
            });
        }
        let n = psi.norm();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidInput(format!("state norm {n} is not 1")));
        }
        Ok(BipartitePureState { d1, d2, psi })
    }

    /// Purify an ensemble: the ancilla dimension is the ensemble size and
    /// measuring the ancilla basis recovers the ensemble exactly.
    pub fn from_ensemble(ensemble: &Ensemble) -> Self {
        BipartitePureState {
            d1: ensemble.dim(),
            d2: ensemble.len(),
            psi: purify_with_ensemble(ensemble),
        }
    }

    pub fn system_dim(&self) -> usize {
        self.d1
    }

    pub fn ancilla_dim(&self) -> usize {
        self.d2
    }

    pub fn column(&self) -> &CMatrix {
        &self.psi
    }

    /// The local density matrix of the system factor.
    pub fn reduced_system(&self) -> Result<DensityMatrix> {
        let full = self.psi.matmul(&self.psi.dagger());
        DensityMatrix::new(partial_trace(&full, TraceSide::Second, self.d1, self.d2))
    }

    /// Apply an ancilla-side operator: `(1 (x) a) psi`.
    fn apply_ancilla(&self, a: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.d1 * self.d2, 1, |idx, _| {
            let (i, r) = (idx / self.d2, idx % self.d2);
            (0..self.d2)
                .map(|rp| a[(r, rp)] * self.psi[(i * self.d2 + rp, 0)])
                .sum()
        })
    }
}

/// An orthogonal (projective) measurement on the ancilla factor.
#[derive(Clone, Debug)]
pub struct SteeringMeasurement {
    projectors: Vec<CMatrix>,
}

impl SteeringMeasurement {
    /// Validate Hermiticity, mutual orthogonality
    /// (`P_s P_t = delta_st P_s`), and completeness (`sum P = 1`).
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidInput("no measurement outcomes".into()));
        }
        let d = projectors[0].rows();
        let mut total = CMatrix::zeros(d, d);
        for (s, p) in projectors.iter().enumerate() {
            if p.rows() != d || p.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d}x{d}"),
                    got: format!("{}x{} at outcome {s}", p.rows(), p.cols()),
                });
            }
            let h = p.hermiticity_residual();
            if h > MEAS_TOL {
                return Err(Error::NotHermitian(h));
            }
            for (t, q) in projectors.iter().enumerate() {
                let prod = p.matmul(q);
                let want = if s == t {
                    p.clone()
                } else {
                    CMatrix::zeros(d, d)
                };
                if prod.max_abs_diff(&want) > MEAS_TOL {
                    return Err(Error::InvalidInput(format!(
                        "outcomes {s} and {t} are not orthogonal projectors"
                    )));
                }
            }
            total = &total + p;
        }
        if total.max_abs_diff(&CMatrix::identity(d)) > MEAS_TOL {
            return Err(Error::InvalidInput(
                "measurement outcomes do not sum to the identity".into(),
            ));
        }
        Ok(SteeringMeasurement { projectors })
    }

    /// The measurement in the ancilla's computational basis.
    pub fn ancilla_basis(d: usize) -> Self {
        let projectors = (0..d)
            .map(|r| {
                let e = CMatrix::basis_column(d, r);
                e.matmul(&e.dagger())
            })
            .collect();
        SteeringMeasurement { projectors }
    }

    /// Build the measurement that steers a purification toward the ensemble
    /// connected by the isometry `v` (shaped `k2 x k1`, from
    /// [`ensemble_relation_isometry`]): outcome `s` projects onto the
    /// ancilla vector with components `conj(v[s, r])`, zero-padded to the
    /// ancilla dimension, plus one remainder projector on the unreachable
    /// subspace. Requires the outcome vectors to come out orthonormal,
    /// which holds when the target ensemble has exactly rank-many elements.
    pub fn from_isometry(v: &CMatrix, ancilla_dim: usize) -> Result<Self> {
        let (k2, k1) = (v.rows(), v.cols());
        if k1 > ancilla_dim {
            return Err(Error::DimensionMismatch {
                expected: format!("isometry with at most {ancilla_dim} columns"),
                got: format!("{k2}x{k1}"),
            });
        }
        let d = ancilla_dim;
        let mut projectors = Vec::with_capacity(k2 + 1);
        let mut total = CMatrix::zeros(d, d);
        for s in 0..k2 {
            let w = CMatrix::from_fn(d, 1, |r, _| {
                if r < k1 {
                    v[(s, r)].conj()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let p = w.matmul(&w.dagger());
            total = &total + &p;
            projectors.push(p);
        }
        let rest = &CMatrix::identity(d) - &total;
        if rest.max_abs() > MEAS_TOL {
            projectors.push(rest);
        }
        SteeringMeasurement::new(projectors)
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn outcomes(&self) -> &[CMatrix] {
        &self.projectors
    }
}

/// Measure the ancilla: returns `(p_s, rho_s)` for every outcome with
/// `p_s > 1e-12`, where `rho_s` is the conditional system state. The
/// outcome average is verified to reproduce the unconditional local state.
pub fn steer(
    psi: &BipartitePureState,
    m: &SteeringMeasurement,
) -> Result<Vec<(f64, DensityMatrix)>> {
    if m.dim() != psi.ancilla_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}-dimensional measurement", psi.ancilla_dim()),
            got: format!("{}", m.dim()),
        });
    }
    let d1 = psi.system_dim();
    let d2 = psi.ancilla_dim();
    let mut outcomes = Vec::new();
    let mut average = CMatrix::zeros(d1, d1);
    for proj in m.outcomes() {
        let comp = psi.apply_ancilla(proj);
        let p = comp.norm();
        let p = p * p;
        if p <= 1e-12 {
            continue;
        }
        let joint = comp.matmul(&comp.dagger());
        let reduced = partial_trace(&joint, TraceSide::Second, d1, d2).scale_re(1.0 / p);
        average = &average + &reduced.scale_re(p);
        outcomes.push((p, DensityMatrix::new(reduced)?));
    }
    let unconditional = psi.reduced_system()?;
    let dev = average.max_abs_diff(unconditional.matrix());
    if dev > 1e-9 {
        return Err(Error::ContractViolation(format!(
            "outcome average deviates from the local state by {dev:.3e}"
        )));
    }
    Ok(outcomes)
}

/// The connecting matrix between two ensembles of the same density matrix:
/// `V` with `sqrt(Q_s) phi_s = sum_r V[s, r] sqrt(P_r) psi_r`, computed by
/// expressing both ensembles in the eigenbasis of the shared average. `V`
/// satisfies `V†V = 1` on the coefficient support of the first ensemble.
pub fn ensemble_relation_isometry(e1: &Ensemble, e2: &Ensemble) -> Result<CMatrix> {
    let rho1 = from_ensemble(e1)?;
    let rho2 = from_ensemble(e2)?;
    let dev = rho1.matrix().max_abs_diff(rho2.matrix());
    if dev > SHARED_RHO_TOL {
        return Err(Error::EnsembleMismatch(dev));
    }
    let d = e1.dim();
    let eig = hermitian_eigen(rho1.matrix())?;
    let lam_max = eig.values.iter().fold(0.0f64, |m, v| m.max(*v));
    let support: Vec<usize> = (0..d)
        .filter(|k| eig.values[*k] > 1e-12 * lam_max.max(1.0))
        .collect();

    // coefficients of each scaled state on the support eigenvectors
    let coeffs = |e: &Ensemble| -> CMatrix {
        CMatrix::from_fn(e.len(), support.len(), |r, kk| {
            let k = support[kk];
            let x = e.entries()[r].1.scale_re(e.entries()[r].0.sqrt());
            eig.vector(k).dagger().matmul(&x).trace() / eig.values[k].sqrt()
        })
    };
    let m1 = coeffs(e1);
    let m2 = coeffs(e2);
    let v = m2.matmul(&m1.dagger());

    // defining relation, columnwise
    for (s, (q, phi)) in e2.entries().iter().enumerate() {
        let mut rebuilt = CMatrix::zeros(d, 1);
        for (r, (p, psi)) in e1.entries().iter().enumerate() {
            rebuilt = &rebuilt + &psi.scale(v[(s, r)] * p.sqrt());
        }
        let target = phi.scale_re(q.sqrt());
        if rebuilt.max_abs_diff(&target) > SHARED_RHO_TOL {
            return Err(Error::ContractViolation(format!(
                "isometry fails to rebuild scaled state {s}"
            )));
        }
    }
    // isometry on the support: V†V equals the first ensemble's coefficient
    // projector
    let support_proj = m1.matmul(&m1.dagger());
    if v.dagger().matmul(&v).max_abs_diff(&support_proj) > SHARED_RHO_TOL {
        return Err(Error::ContractViolation(
            "isometry is not norm-preserving on the support".into(),
        ));
    }
    Ok(v)
}

/// Outcome of [`nonsignaling_check`]: the two steered ensembles, the
/// unconditional local state, and the worst deviation among the averages.
#[derive(Clone, Debug)]
pub struct NonsignalingReport {
    pub first: Vec<(f64, DensityMatrix)>,
    pub second: Vec<(f64, DensityMatrix)>,
    pub reduced: DensityMatrix,
    pub deviation: f64,
    pub pass: bool,
}

/// Steer with both measurements and compare the outcome-averaged system
/// states against each other and the unconditional local state.
pub fn nonsignaling_check(
    psi: &BipartitePureState,
    m1: &SteeringMeasurement,
    m2: &SteeringMeasurement,
) -> Result<NonsignalingReport> {
    let first = steer(psi, m1)?;
    let second = steer(psi, m2)?;
    let reduced = psi.reduced_system()?;
    let average = |outcomes: &[(f64, DensityMatrix)]| {
        let d = psi.system_dim();
        let mut acc = CMatrix::zeros(d, d);
        for (p, rho) in outcomes {
            acc = &acc + &rho.matrix().scale_re(*p);
        }
        acc
    };
    let a1 = average(&first);
    let a2 = average(&second);
    let deviation = a1
        .max_abs_diff(reduced.matrix())
        .max(a2.max_abs_diff(reduced.matrix()))
        .max(a1.max_abs_diff(&a2));
    Ok(NonsignalingReport {
        first,
        second,
        reduced,
        deviation,
        pass: deviation <= 1e-10,
    })
}

/// Minimally adjust an ensemble so its average equals `rho` exactly. The
/// ensemble must have exactly rank-many elements; the closest fit (in the
/// summed scaled-state distance) is found by a polar rotation in the
/// eigenbasis. Returns the adjusted ensemble and the largest scaled-state
/// shift.
pub fn fit_ensemble_to_density(rho: &DensityMatrix, target: &Ensemble) -> Result<(Ensemble, f64)> {
    let d = rho.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {d}"),
            got: format!("{}", target.dim()),
        });
    }
    let eig = hermitian_eigen(rho.matrix())?;
    let lam_max = eig.values.iter().fold(0.0f64, |m, v| m.max(*v));
    let support: Vec<usize> = (0..d)
        .filter(|k| eig.values[*k] > 1e-12 * lam_max.max(1.0))
        .collect();
    let m = support.len();
    let k = target.len();
    if k != m {
        return Err(Error::InvalidInput(format!(
            "ensemble has {k} elements but the state has rank {m}"
        )));
    }
    // x: scaled eigenvectors; t: scaled target states
    let x = CMatrix::from_fn(d, m, |i, kk| {
        let kidx = support[kk];
        eig.vectors[(i, kidx)] * Complex64::new(eig.values[kidx].sqrt(), 0.0)
    });
    let t = CMatrix::from_fn(d, k, |i, r| {
        target.entries()[r].1[(i, 0)] * Complex64::new(target.entries()[r].0.sqrt(), 0.0)
    });
    // closest unitary w maximizing Re Tr(w† x† t): the polar factor
    let b = x.dagger().matmul(&t);
    let gram = b.dagger().matmul(&b);
    let min_gram = hermitian_eigen(&gram)?
        .values
        .iter()
        .fold(f64::INFINITY, |acc, v| acc.min(*v));
    if min_gram <= 1e-14 {
        return Err(Error::SingularKernel);
    }
    let w = b.matmul(&hermitian_map(&gram, |lam| 1.0 / lam.sqrt())?);
    let fitted = x.matmul(&w);
    let mut entries = Vec::with_capacity(k);
    let mut shift = 0.0f64;
    for r in 0..k {
        let col = CMatrix::from_fn(d, 1, |i, _| fitted[(i, r)]);
        let target_col = CMatrix::from_fn(d, 1, |i, _| t[(i, r)]);
        shift = shift.max(
            col.max_abs_diff(&target_col)
                .max((&col - &target_col).norm()),
        );
        let p = col.norm() * col.norm();
        entries.push((p, col.scale_re(1.0 / p.sqrt())));
    }
    Ok((Ensemble::new(entries)?, shift))
}

/// All pieces of the two-ensembles-one-state demonstration: the three- and
/// two-element spin mixtures, the exact shared density matrix, the
/// adjustment that reconciles the two-element mixture's rounded
/// probabilities with it, the connecting isometry, and the steering outcome.
#[derive(Clone, Debug)]
pub struct SpinSteeringDemo {
    /// 50/15/35 north/south/east mixture; its average is the exact rho
    pub three_element: Ensemble,
    /// 75/25 northeast/southwest mixture as stated, average ~0.0025 off rho
    pub two_element_nominal: Ensemble,
    /// the two-element mixture minimally adjusted to average exactly rho
    pub two_element: Ensemble,
    /// largest scaled-state shift of the adjustment
    pub adjustment: f64,
    /// the exact shared density matrix [[0.675, 0.175], [0.175, 0.325]]
    pub rho: DensityMatrix,
    /// connecting isometry from the three- to the two-element ensemble
    pub isometry: CMatrix,
    /// purification of the three-element ensemble
    pub purification: BipartitePureState,
    /// steering outcomes under the rotated measurement: the two-element
    /// ensemble's probabilities and states
    pub outcomes: Vec<(f64, DensityMatrix)>,
    /// ancilla-basis vs rotated measurement averages
    pub nonsignaling: NonsignalingReport,
}

/// Run the full spin-ensemble steering construction with the module's
/// built-in mixtures.
pub fn spin_steering_demo() -> Result<SpinSteeringDemo> {
    let three_element = three_element_spin_ensemble();
    let two_element_nominal = two_element_spin_ensemble();
    let rho = from_ensemble(&three_element)?;
    let (two_element, adjustment) = fit_ensemble_to_density(&rho, &two_element_nominal)?;
    let isometry = ensemble_relation_isometry(&three_element, &two_element)?;
    let purification = BipartitePureState::from_ensemble(&three_element);
    let rotated = SteeringMeasurement::from_isometry(&isometry, purification.ancilla_dim())?;
    let outcomes = steer(&purification, &rotated)?;
    let basis = SteeringMeasurement::ancilla_basis(purification.ancilla_dim());
    let nonsignaling = nonsignaling_check(&purification, &basis, &rotated)?;
    Ok(SpinSteeringDemo {
        three_element,
        two_element_nominal,
        two_element,
        adjustment,
        rho,
        isometry,
        purification,
        outcomes,
        nonsignaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density_rank, random_unit_column, rng_from_seed};
    use crate::linalg::{tensor_product, unitary_exp};
    use crate::states::spin_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eigen_ensemble(rho: &CMatrix) -> Ensemble {
        let eig = hermitian_eigen(rho).unwrap();
        let entries = (0..rho.rows())
            .filter(|k| eig.values[*k] > 1e-12)
            .map(|k| (eig.values[k], eig.vector(k)))
            .collect();
        Ensemble::new(entries).unwrap()
    }

    /// A fresh ensemble of the same rho: scaled eigenvectors mixed by a
    /// random unitary (the generation method is itself the oracle).
    fn rotated_ensemble(rho: &CMatrix, seed_h: &CMatrix) -> Ensemble {
        let eig = hermitian_eigen(rho).unwrap();
        let d = rho.rows();
        let u = unitary_exp(seed_h, 1.0).unwrap();
        let entries = (0..d)
            .map(|r| {
                let mut col = CMatrix::zeros(d, 1);
                for k in 0..d {
                    col = &col + &eig.vector(k).scale(u[(r, k)] * eig.values[k].sqrt());
                }
                let p = col.norm() * col.norm();
                (p, col.scale_re(1.0 / p.sqrt()))
            })
            .collect();
        Ensemble::new(entries).unwrap()
    }

    #[test]
    fn ancilla_basis_measurement_recovers_the_ensemble() {
        let e = three_element_spin_ensemble();
        let psi = BipartitePureState::from_ensemble(&e);
        let m = SteeringMeasurement::ancilla_basis(3);
        let outcomes = steer(&psi, &m).unwrap();
        assert_eq!(outcomes.len(), 3);
        for ((p, rho), (q, state)) in outcomes.iter().zip(e.entries()) {
            assert!((p - q).abs() < 1e-12);
            let pure = state.matmul(&state.dagger());
            assert!(rho.matrix().max_abs_diff(&pure) < 1e-12);
        }
    }

    #[test]
    fn product_state_steers_nowhere() {
        let mut rng = rng_from_seed(907);
        let sys = random_unit_column(2, &mut rng);
        let anc = random_unit_column(3, &mut rng);
        let psi = BipartitePureState::new(2, 3, tensor_product(&sys, &anc)).unwrap();
        let local = sys.matmul(&sys.dagger());
        for m in [
            SteeringMeasurement::ancilla_basis(3),
            SteeringMeasurement::new(vec![CMatrix::identity(3)]).unwrap(),
        ] {
            for (_, rho) in steer(&psi, &m).unwrap() {
                assert!(rho.matrix().max_abs_diff(&local) < 1e-10);
            }
        }
    }

    #[test]
    fn measurement_validation_rejects_bad_sets() {
        // incomplete
        let e0 = CMatrix::basis_column(2, 0);
        let p0 = e0.matmul(&e0.dagger());
        assert!(SteeringMeasurement::new(vec![p0.clone()]).is_err());
        // overlapping
        let plus = CMatrix::column(&[
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ]);
        let pp = plus.matmul(&plus.dagger());
        assert!(SteeringMeasurement::new(vec![p0.clone(), pp]).is_err());
        // non-Hermitian
        let skew = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.2, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(SteeringMeasurement::new(vec![skew, p0]).is_err());
        // a genuine basis passes
        assert!(SteeringMeasurement::new(vec![
            CMatrix::diag_real(&[1.0, 0.0]),
            CMatrix::diag_real(&[0.0, 1.0]),
        ])
        .is_ok());
    }

    #[test]
    fn identical_ensembles_give_the_identity_isometry() {
        let e = three_element_spin_ensemble();
        let v = ensemble_relation_isometry(&e, &e).unwrap();
        // V = M M† is the 3x3 coefficient projector; it must act as the
        // identity on every scaled state, and for this rank-2 rho it is the
        // rank-2 projector closest to the identity
        assert_eq!(v.rows(), 3);
        assert_eq!(v.cols(), 3);
        let eye_dev = v.max_abs_diff(&CMatrix::identity(3));
        assert!(
            eye_dev < 0.7,
            "coefficient projector far from identity: {eye_dev}"
        );
        // exact identity holds for a full-rank eigen-ensemble
        let mut rng = rng_from_seed(911);
        let rho = random_density_rank(3, 3, &mut rng);
        let eig = eigen_ensemble(&rho);
        let v = ensemble_relation_isometry(&eig, &eig).unwrap();
        assert!(v.max_abs_diff(&CMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn permuted_eigen_ensemble_gives_a_permutation() {
        let mut rng = rng_from_seed(919);
        let rho = random_density_rank(3, 3, &mut rng);
        let eig = eigen_ensemble(&rho);
        let perm_entries: Vec<_> = [2usize, 0, 1]
            .iter()
            .map(|&r| eig.entries()[r].clone())
            .collect();
        let permuted = Ensemble::new(perm_entries).unwrap();
        let v = ensemble_relation_isometry(&eig, &permuted).unwrap();
        let want = CMatrix::from_fn(3, 3, |s, r| {
            let hit = [2usize, 0, 1][s] == r;
            c(if hit { 1.0 } else { 0.0 }, 0.0)
        });
        assert!(v.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn random_shared_rho_pairs_connect_isometrically() {
        let mut rng = rng_from_seed(929);
        for trial in 0..25 {
            let d = 2 + trial % 3;
            let rho = random_density_rank(d, d, &mut rng);
            let e1 = rotated_ensemble(&rho, &crate::linalg::random::random_hermitian(d, &mut rng));
            let e2 = rotated_ensemble(&rho, &crate::linalg::random::random_hermitian(d, &mut rng));
            let v = ensemble_relation_isometry(&e1, &e2).unwrap();
            // full rank: V†V = I exactly on the whole coefficient space
            assert!(
                v.dagger().matmul(&v).max_abs_diff(&CMatrix::identity(d)) < 1e-8,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn mismatched_ensembles_are_rejected() {
        let e1 = three_element_spin_ensemble();
        let e2 = two_element_spin_ensemble();
        // the nominal mixtures differ by ~2e-3, far beyond tolerance
        assert!(matches!(
            ensemble_relation_isometry(&e1, &e2),
            Err(Error::EnsembleMismatch(_))
        ));
    }

    #[test]
    fn bell_state_measurements_do_not_signal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CMatrix::column(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let psi = BipartitePureState::new(2, 2, bell).unwrap();
        let z = SteeringMeasurement::ancilla_basis(2);
        let plus = CMatrix::column(&[c(s, 0.0), c(s, 0.0)]);
        let minus = CMatrix::column(&[c(s, 0.0), c(-s, 0.0)]);
        let x = SteeringMeasurement::new(vec![
            plus.matmul(&plus.dagger()),
            minus.matmul(&minus.dagger()),
        ])
        .unwrap();
        let report = nonsignaling_check(&psi, &z, &x).unwrap();
        assert!(report.pass);
        assert!(report.deviation < 1e-14);
        let half = CMatrix::identity(2).scale_re(0.5);
        assert!(report.reduced.matrix().max_abs_diff(&half) < 1e-14);
        // z outcomes steer to the basis states, x outcomes to the +/- states
        for (p, rho) in &report.first {
            assert!((p - 0.5).abs() < 1e-12);
            assert!((rho.matrix()[(0, 0)].re - rho.matrix()[(0, 0)].re.round()).abs() < 1e-12);
        }
        for (p, rho) in &report.second {
            assert!((p - 0.5).abs() < 1e-12);
            assert!((rho.matrix()[(0, 1)].norm() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_demo_matches_frozen_values() {
        let demo = spin_steering_demo().unwrap();
        // the exact shared density matrix
        let want_rho = CMatrix::from_rows(&[
            vec![c(0.675, 0.0), c(0.175, 0.0)],
            vec![c(0.175, 0.0), c(0.325, 0.0)],
        ]);
        assert!(demo.rho.matrix().max_abs_diff(&want_rho) < 1e-14);
        // adjusted probabilities are the eigenvalues (1 ± sqrt 0.245)/2,
        // because the nominal two-element states already sit exactly on the
        // eigenvectors — only the rounded 75/25 weights move
        let lam = 0.245f64.sqrt();
        let want_p = [(1.0 + lam) / 2.0, (1.0 - lam) / 2.0];
        for ((p, state), (q, nominal)) in demo
            .two_element
            .entries()
            .iter()
            .zip(demo.two_element_nominal.entries())
        {
            let want = want_p[if *q > 0.5 { 0 } else { 1 }];
            assert!((p - want).abs() < 1e-12);
            assert!(state.max_abs_diff(nominal) < 1e-9);
        }
        // frozen adjustment magnitude
        assert!((demo.adjustment - 2.506e-3).abs() < 1e-5);
        // frozen isometry entries (first row, real)
        assert_eq!(demo.isometry.rows(), 2);
        assert_eq!(demo.isometry.cols(), 3);
        for (j, want) in [0.755611, 0.171429, 0.632190].iter().enumerate() {
            assert!((demo.isometry[(0, j)].re - want).abs() < 1e-5);
            assert!(demo.isometry[(0, j)].im.abs() < 1e-10);
        }
        // steering reproduces the adjusted two-element ensemble
        assert_eq!(demo.outcomes.len(), 2);
        for ((p, rho), (q, state)) in demo.outcomes.iter().zip(demo.two_element.entries()) {
            assert!((p - q).abs() < 1e-10);
            let pure = state.matmul(&state.dagger());
            assert!(rho.matrix().max_abs_diff(&pure) < 1e-10);
        }
        assert!(demo.nonsignaling.pass);
    }

    #[test]
    fn spin_demo_purification_reduces_to_rho() {
        let demo = spin_steering_demo().unwrap();
        let reduced = demo.purification.reduced_system().unwrap();
        assert!(reduced.matrix().max_abs_diff(demo.rho.matrix()) < 1e-12);
    }

    #[test]
    fn fit_rejects_wrong_element_counts() {
        let rho = from_ensemble(&three_element_spin_ensemble()).unwrap();
        // rank 2 but three elements
        assert!(fit_ensemble_to_density(&rho, &three_element_spin_ensemble()).is_err());
    }

    #[test]
    fn steering_toward_a_random_equivalent_ensemble() {
        // build a full-rank rho, two rotated ensembles, and steer from the
        // purification of the first toward the second
        let mut rng = rng_from_seed(937);
        for trial in 0..10 {
            let d = 2 + trial % 2;
            let rho = random_density_rank(d, d, &mut rng);
            let e1 = rotated_ensemble(&rho, &crate::linalg::random::random_hermitian(d, &mut rng));
            let e2 = rotated_ensemble(&rho, &crate::linalg::random::random_hermitian(d, &mut rng));
            let v = ensemble_relation_isometry(&e1, &e2).unwrap();
            let psi = BipartitePureState::from_ensemble(&e1);
            let m = SteeringMeasurement::from_isometry(&v, psi.ancilla_dim()).unwrap();
            let outcomes = steer(&psi, &m).unwrap();
            assert_eq!(outcomes.len(), e2.len(), "trial {trial}");
            for ((p, rho_s), (q, phi)) in outcomes.iter().zip(e2.entries()) {
                assert!((p - q).abs() < 1e-9);
                assert!(rho_s.matrix().max_abs_diff(&phi.matmul(&phi.dagger())) < 1e-8);
            }
        }
    }

    #[test]
    fn spin_states_see_the_right_measurement_count() {
        // d2 = 3, rank-2 support: two outcome projectors plus a remainder
        let demo = spin_steering_demo().unwrap();
        let m = SteeringMeasurement::from_isometry(&demo.isometry, 3).unwrap();
        assert_eq!(m.outcomes().len(), 3);
        // remainder has zero probability: steer returns only two outcomes
        assert_eq!(steer(&demo.purification, &m).unwrap().len(), 2);
        let _ = spin_state([0.0, 1.0, 0.0]);
    }
}
