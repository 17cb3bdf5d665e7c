//! Time evolution of density matrices under a Markovian master equation.
//!
//! The generator has the standard form
//!
//! ```text
//! drho/dt = -i [H, rho] + sum_a ( L_a rho L_a† - 1/2 {L_a† L_a, rho} )
//! ```
//!
//! with Hermitian `H` and arbitrary jump operators `L_a`. Forward evolution
//! preserves trace, Hermiticity, and positivity; run backwards it preserves
//! the first two but generically drives eigenvalues negative in finite
//! time — [`backward_breakdown`] locates that crossing.
//!
//! Integration is fixed-step classical Runge-Kutta with a step-doubling
//! error monitor; the right-hand side is linear, so the scheme is exact to
//! O(dt^5) per step and the monitor is a direct estimate of the local
//! truncation error.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::{derive_tensors, SymmetryGenerator};
use crate::linalg::{anticommutator, commutator, min_eigenvalue, CMatrix};

/// Local truncation error (per step, max-abs) above which integration
/// refuses to proceed.
const STEP_ERROR_TOL: f64 = 1e-6;
/// Eigenvalue threshold treated as a genuine positivity loss rather than
/// roundoff.
const BREAKDOWN_TOL: f64 = -1e-8;

/// A master-equation generator: Hamiltonian plus jump operators.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    h: CMatrix,
    jumps: Vec<CMatrix>,
}

impl LindbladGenerator {
    /// Validate shapes and Hermiticity of the Hamiltonian.
    pub fn new(h: CMatrix, jumps: Vec<CMatrix>) -> Result<Self> {
        let d = h.rows();
        if h.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: "square Hamiltonian".into(),
                got: format!("{}x{}", h.rows(), h.cols()),
            });
        }
        let herm = h.hermiticity_residual();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        for (a, l) in jumps.iter().enumerate() {
            if l.rows() != d || l.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d}x{d}"),
                    got: format!("{}x{} at jump {a}", l.rows(), l.cols()),
                });
            }
        }
        Ok(LindbladGenerator { h, jumps })
    }

    /// Translate a symmetry direction into master-equation data: the
    /// Hamiltonian is `-n·T` and each noise term `(Delta_a, u_a)` becomes
    /// the jump `sqrt(Delta_a) u_a`. Negative strengths below `-1e-10` have
    /// no completely positive semigroup and are rejected.
    pub fn from_generator(g: &SymmetryGenerator, n: &[f64]) -> Result<Self> {
        // surfaces linearity/tracelessness violations early
        derive_tensors(g)?;
        let h = g.t_along(n).scale_re(-1.0);
        let mut jumps = Vec::new();
        for term in g.noise_terms(n) {
            if term.delta < -1e-10 {
                return Err(Error::NegativeDelta(term.delta));
            }
            let delta = term.delta.max(0.0);
            if delta == 0.0 {
                continue;
            }
            jumps.push(term.u.scale_re(delta.sqrt()));
        }
        LindbladGenerator::new(h, jumps)
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.h
    }

    pub fn jumps(&self) -> &[CMatrix] {
        &self.jumps
    }

    /// The right-hand side of the master equation at a given state.
    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let mut out = commutator(&self.h, rho).scale(Complex64::new(0.0, -1.0));
        for l in &self.jumps {
            let gain = l.sandwich(rho);
            let ll = l.dagger().matmul(l);
            out = &out + &(&gain - &anticommutator(&ll, rho).scale_re(0.5));
        }
        out
    }

    fn rk4_step(&self, rho: &CMatrix, dt: f64) -> CMatrix {
        let k1 = self.rhs(rho);
        let k2 = self.rhs(&(rho + &k1.scale_re(0.5 * dt)));
        let k3 = self.rhs(&(rho + &k2.scale_re(0.5 * dt)));
        let k4 = self.rhs(&(rho + &k3.scale_re(dt)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_re(2.0);
        rho + &incr.scale_re(dt / 6.0)
    }

    /// Advance one monitored step: the full-step value is compared against
    /// two half steps and the Richardson error estimate
    /// `max|y_full - y_half| / 15` must stay below 1e-6.
    pub fn step(&self, rho: &CMatrix, dt: f64) -> Result<CMatrix> {
        let full = self.rk4_step(rho, dt);
        let half = self.rk4_step(&self.rk4_step(rho, 0.5 * dt), 0.5 * dt);
        let err = full.max_abs_diff(&half) / 15.0;
        if err > STEP_ERROR_TOL {
            return Err(Error::StepTooLarge(err));
        }
        Ok(half)
    }

    /// Integrate from `rho` over `t` (either sign) with fixed step `dt > 0`,
    /// recording every accepted state. The returned trajectory includes the
    /// initial state; a final partial step lands exactly on `t`.
    pub fn integrate(&self, rho: &CMatrix, t: f64, dt: f64) -> Result<Trajectory> {
        if dt <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "step size {dt} must be positive"
            )));
        }
        if rho.rows() != self.dim() || rho.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.dim()),
                got: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let direction = if t < 0.0 { -1.0 } else { 1.0 };
        let span = t.abs();
        let mut states = vec![rho.clone()];
        let mut times = vec![0.0];
        let mut current = rho.clone();
        let mut elapsed = 0.0;
        let initial_trace = rho.trace();
        while elapsed < span - 1e-15 {
            let step = dt.min(span - elapsed);
            current = self.step(&current, direction * step)?;
            elapsed += step;
            let drift = (current.trace() - initial_trace).norm();
            if drift > 1e-9 * (1.0 + elapsed / dt) {
                return Err(Error::ContractViolation(format!(
                    "trace drift {drift:.3e} after t = {:.6}",
                    direction * elapsed
                )));
            }
            times.push(direction * elapsed);
            states.push(current.clone());
        }
        Ok(Trajectory { times, states })
    }
}

/// A recorded evolution: matched lists of times and states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &CMatrix {
        self.states.last().expect("trajectory never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory never empty")
    }

    /// Minimum eigenvalue along the trajectory, per recorded state.
    pub fn min_eigenvalues(&self) -> Result<Vec<f64>> {
        self.states
            .iter()
            .map(|s| min_eigenvalue(&s.hermitian_part()))
            .collect()
    }

    /// Render the trajectory as CSV: a header, then per state one row of
    /// `time, trace_re, min_eig` followed by the d^2 entries as
    /// re/im pairs in row-major order.
    pub fn to_csv(&self) -> Result<String> {
        let d = self.states[0].rows();
        let mut out = String::new();
        out.push_str("time,trace_re,min_eig");
        for r in 0..d {
            for c in 0..d {
                write!(out, ",re_{r}{c},im_{r}{c}").expect("string write");
            }
        }
        out.push('\n');
        let eigs = self.min_eigenvalues()?;
        for ((time, state), min_eig) in self.times.iter().zip(&self.states).zip(&eigs) {
            write!(
                out,
                "{:.12e},{:.12e},{:.12e}",
                time,
                state.trace().re,
                min_eig
            )
            .expect("string write");
            for r in 0..d {
                for c in 0..d {
                    let z = state[(r, c)];
                    write!(out, ",{:.12e},{:.12e}", z.re, z.im).expect("string write");
                }
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Report of a backward-evolution positivity loss.
#[derive(Clone, Debug)]
pub struct BreakdownReport {
    /// interpolated (negative) time of the first eigenvalue crossing
    pub time: f64,
    /// minimum eigenvalue at the last recorded state before the crossing
    pub last_positive_eig: f64,
    /// minimum eigenvalue at the first recorded state past the crossing
    pub first_negative_eig: f64,
}

/// Integrate backwards from `rho` until the minimum eigenvalue first drops
/// below the roundoff floor, and linearly interpolate the crossing time
/// between the bracketing recorded states. `Ok(None)` means positivity
/// survived the whole horizon.
pub fn backward_breakdown(
    gen: &LindbladGenerator,
    rho: &CMatrix,
    horizon: f64,
    dt: f64,
) -> Result<Option<BreakdownReport>> {
    if horizon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} must be positive"
        )));
    }
    let traj = gen.integrate(rho, -horizon, dt)?;
    let eigs = traj.min_eigenvalues()?;
    for k in 1..eigs.len() {
        if eigs[k] < BREAKDOWN_TOL {
            let (e0, e1) = (eigs[k - 1], eigs[k]);
            let (t0, t1) = (traj.times[k - 1], traj.times[k]);
            let frac = if (e0 - e1).abs() > 0.0 {
                e0 / (e0 - e1)
            } else {
                1.0
            };
            return Ok(Some(BreakdownReport {
                time: t0 + frac * (t1 - t0),
                last_positive_eig: e0,
                first_negative_eig: e1,
            }));
        }
    }
    Ok(None)
}
