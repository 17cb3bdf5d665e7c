//! Infinitesimal symmetry data for continuous groups acting on density
//! matrices.
//!
//! A direction `n` in parameter space generates the first-order change
//!
//! ```text
//! drho = i [n·T, rho] + sum_a Delta_a(n) ( u_a rho u_a† - 1/2 {u_a† u_a, rho} )
//! ```
//!
//! with Hermitian matrices `T_r` and direction-dependent noise data
//! `(Delta_a(n), u_a(n))`, the `u_a` traceless. The noise eigenvalues scale
//! linearly, `Delta(c n) = c Delta(n)`, and the noise part of the kernel
//! derivative is linear in `n`, which yields per-direction tensors `L_r`,
//! `theta_r`, and `tau_r = T_r - (i/2) theta_r`.
//!
//! The group multiplication law constrains this data: writing `G(n)` for the
//! full first-order map, closure requires
//!
//! ```text
//! [G(n), G(nbar)] + sum_r (C^r_{st} n^s nbar^t) G_r = 0
//! ```
//!
//! with the structure constants fixed by `[T_s, T_t] = i sum_r C^r_{st} T_r`
//! in the noiseless (unitary) case. [`group_residual`] evaluates this
//! identity term by term; [`build_section5`] constructs a commuting family
//! that satisfies it while acting differently from any unitary conjugation,
//! and [`positivity_probe`] searches for the states whose positivity such a
//! family necessarily violates.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::channels::{su3_example_kernel, Kernel};
use crate::error::{Error, Result};
use crate::linalg::random::{
    random_density_with_null_vector, random_unit_column, rng_for_trial, rng_from_seed,
};
use crate::linalg::{
    anticommutator, commutator, hermitian_eigen, kernel_outer, min_eigenvalue, unitary_exp, CMatrix,
};

/// Tolerance for structural identities on generator data.
const STRUCT_TOL: f64 = 1e-10;
/// Pass/fail threshold for sampled checks.
const PASS_TOL: f64 = 1e-8;

/// Antisymmetric structure constants `C^r_{st}` of a Lie algebra, stored
/// flat with index `((r * r_dim) + s) * r_dim + t`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    r_dim: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    /// Validate antisymmetry (exact) and the Jacobi identity (to 1e-10).
    pub fn new(r_dim: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != r_dim * r_dim * r_dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", r_dim * r_dim * r_dim),
                got: format!("{}", c.len()),
            });
        }
        let sc = StructureConstants { r_dim, c };
        for r in 0..r_dim {
            for s in 0..r_dim {
                for t in 0..r_dim {
                    if sc.get(r, s, t) != -sc.get(r, t, s) {
                        return Err(Error::InvalidInput(format!(
                            "structure constants not antisymmetric at ({r},{s},{t})"
                        )));
                    }
                }
            }
        }
        let jac = sc.jacobi_residual();
        if jac > STRUCT_TOL {
            return Err(Error::InvalidInput(format!(
                "Jacobi identity residual {jac:.3e}"
            )));
        }
        Ok(sc)
    }

    /// All-zero constants (an abelian algebra).
    pub fn zero(r_dim: usize) -> Self {
        StructureConstants {
            r_dim,
            c: vec![0.0; r_dim * r_dim * r_dim],
        }
    }

    /// The three-dimensional rotation algebra: C^r_{st} = Levi-Civita.
    pub fn su2() -> Self {
        let mut c = vec![0.0; 27];
        let eps = [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)];
        for (r, s, t, v) in eps {
            c[(r * 3 + s) * 3 + t] = v;
            c[(r * 3 + t) * 3 + s] = -v;
        }
        StructureConstants { r_dim: 3, c }
    }

    /// Extract constants from a closed set of Hermitian generators
    /// satisfying `[T_s, T_t] = i sum_r C^r_{st} T_r`, using trace inner
    /// products. The generators must be nonzero, mutually orthogonal under
    /// Tr(A†B), and actually close under commutation.
    pub fn from_generators(t: &[CMatrix]) -> Result<Self> {
        let r_dim = t.len();
        let norms: Vec<f64> = t.iter().map(|m| m.inner(m).re).collect();
        for (r, nr) in norms.iter().enumerate() {
            if *nr < 1e-12 {
                return Err(Error::InvalidInput(format!("generator {r} vanishes")));
            }
            for s in 0..r {
                if t[s].inner(&t[r]).norm() > 1e-10 * (norms[s] * nr).sqrt() {
                    return Err(Error::InvalidInput(format!(
                        "generators {s} and {r} are not orthogonal"
                    )));
                }
            }
        }
        let mut c = vec![0.0; r_dim * r_dim * r_dim];
        for s in 0..r_dim {
            for tt in 0..r_dim {
                let comm = commutator(&t[s], &t[tt]);
                let mut resid = comm.clone();
                for r in 0..r_dim {
                    // C^r_{st} = Tr(T_r† [T_s,T_t]) / (i Tr(T_r† T_r))
                    let coeff = t[r].inner(&comm) / Complex64::new(0.0, norms[r]);
                    if coeff.im.abs() > 1e-9 {
                        return Err(Error::InvalidInput(format!(
                            "complex structure constant at ({r},{s},{tt})"
                        )));
                    }
                    c[(r * r_dim + s) * r_dim + tt] = coeff.re;
                    resid = &resid - &t[r].scale(Complex64::new(0.0, coeff.re));
                }
                if resid.max_abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "generators do not close under commutation at ({s},{tt}), residual {:.3e}",
                        resid.max_abs()
                    )));
                }
            }
        }
        StructureConstants::new(r_dim, c)
    }

    /// Constants with reversed sign (still a valid antisymmetric, Jacobi-
    /// consistent set — of the opposite-orientation algebra).
    pub fn negated(&self) -> Self {
        StructureConstants {
            r_dim: self.r_dim,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn r_dim(&self) -> usize {
        self.r_dim
    }

    pub fn get(&self, r: usize, s: usize, t: usize) -> f64 {
        self.c[(r * self.r_dim + s) * self.r_dim + t]
    }

    /// Contraction `C~^r = sum_{st} C^r_{st} n^s nbar^t`.
    pub fn contract(&self, n: &[f64], nbar: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.r_dim];
        for r in 0..self.r_dim {
            for s in 0..self.r_dim {
                for t in 0..self.r_dim {
                    out[r] += self.get(r, s, t) * n[s] * nbar[t];
                }
            }
        }
        out
    }

    /// Max-abs residual of the cyclic Jacobi identity
    /// `sum_u (C^u_{st} C^v_{ur} + C^u_{tr} C^v_{us} + C^u_{rs} C^v_{ut}) = 0`.
    pub fn jacobi_residual(&self) -> f64 {
        let k = self.r_dim;
        let mut worst = 0.0f64;
        for s in 0..k {
            for t in 0..k {
                for r in 0..k {
                    for v in 0..k {
                        let mut acc = 0.0;
                        for u in 0..k {
                            acc += self.get(u, s, t) * self.get(v, u, r)
                                + self.get(u, t, r) * self.get(v, u, s)
                                + self.get(u, r, s) * self.get(v, u, t);
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        worst
    }

    /// Max-abs residual of `[T_s, T_t] = i sum_r C^r_{st} T_r` for a given
    /// set of Hermitian matrices.
    pub fn commutator_residual(&self, t: &[CMatrix]) -> f64 {
        let d = t[0].rows();
        let mut worst = 0.0f64;
        for s in 0..self.r_dim {
            for tt in 0..self.r_dim {
                let mut want = CMatrix::zeros(d, d);
                for r in 0..self.r_dim {
                    want = &want + &t[r].scale(Complex64::new(0.0, self.get(r, s, tt)));
                }
                worst = worst.max(commutator(&t[s], &t[tt]).max_abs_diff(&want));
            }
        }
        worst
    }
}

/// One noise term `(Delta, u)` of a generator at a given direction.
#[derive(Clone, Debug)]
pub struct NoiseTerm {
    pub delta: f64,
    pub u: CMatrix,
}

/// Direction-dependent noise data: the map `n -> [(Delta_a(n), u_a(n))]`.
///
/// Contract: the `u_a(n)` are traceless; the combined sum
/// `sum_a Delta_a(n) u_a (x) u_a†` is linear in `n`; and
/// `Delta(c n) = c Delta(n)` for scalars `c > 0`. At the unit directions the
/// terms of one call should be mutually orthonormal under `Tr(u† v)`.
pub trait NoiseModel: Send + Sync {
    fn terms(&self, n: &[f64]) -> Vec<NoiseTerm>;
}

/// The noiseless (purely unitary) case.
pub struct NoNoise;

impl NoiseModel for NoNoise {
    fn terms(&self, _n: &[f64]) -> Vec<NoiseTerm> {
        Vec::new()
    }
}

/// Noise given by a fixed table per unit direction and extended linearly:
/// `terms(n) = union_r (n^r Delta_{r a}, u_{r a})` over directions with
/// nonzero component.
pub struct TableNoise {
    per_direction: Vec<Vec<NoiseTerm>>,
}

impl TableNoise {
    pub fn new(per_direction: Vec<Vec<NoiseTerm>>) -> Self {
        TableNoise { per_direction }
    }
}

impl NoiseModel for TableNoise {
    fn terms(&self, n: &[f64]) -> Vec<NoiseTerm> {
        let mut out = Vec::new();
        for (r, table) in self.per_direction.iter().enumerate() {
            if n[r] == 0.0 {
                continue;
            }
            for term in table {
                out.push(NoiseTerm {
                    delta: n[r] * term.delta,
                    u: term.u.clone(),
                });
            }
        }
        out
    }
}

/// Noise for a commuting family sharing one diagonal basis: fixed matrices
/// `u_a` with strengths `Delta_a(n) = (sum_r n^r) delta_a`.
struct SharedBasisNoise {
    deltas: Vec<f64>,
    us: Vec<CMatrix>,
}

impl NoiseModel for SharedBasisNoise {
    fn terms(&self, n: &[f64]) -> Vec<NoiseTerm> {
        let weight: f64 = n.iter().sum();
        self.deltas
            .iter()
            .zip(&self.us)
            .map(|(delta, u)| NoiseTerm {
                delta: weight * delta,
                u: u.clone(),
            })
            .collect()
    }
}

/// A continuous-symmetry generator: Hermitian matrices `T_r`, a noise model,
/// and the algebra's structure constants.
#[derive(Clone)]
pub struct SymmetryGenerator {
    d: usize,
    t: Vec<CMatrix>,
    sc: StructureConstants,
    noise: Arc<dyn NoiseModel>,
}

impl SymmetryGenerator {
    /// Check Hermiticity of every `T_r` and shape consistency. Noise-model
    /// contract checks are sampled separately by [`check_noise_contract`].
    pub fn new(
        t: Vec<CMatrix>,
        sc: StructureConstants,
        noise: Arc<dyn NoiseModel>,
    ) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::InvalidInput("no generator matrices given".into()));
        }
        if t.len() != sc.r_dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} structure-constant directions", t.len()),
                got: format!("{}", sc.r_dim()),
            });
        }
        let d = t[0].rows();
        for (r, m) in t.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d}x{d}"),
                    got: format!("{}x{} at direction {r}", m.rows(), m.cols()),
                });
            }
            let h = m.hermiticity_residual();
            if h > STRUCT_TOL {
                return Err(Error::NotHermitian(h));
            }
        }
        Ok(SymmetryGenerator { d, t, sc, noise })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn r_dim(&self) -> usize {
        self.t.len()
    }

    pub fn t(&self) -> &[CMatrix] {
        &self.t
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn noise_terms(&self, n: &[f64]) -> Vec<NoiseTerm> {
        self.noise.terms(n)
    }

    /// `n · T = sum_r n^r T_r`.
    pub fn t_along(&self, n: &[f64]) -> CMatrix {
        lincomb(&self.t, n)
    }
}

fn lincomb(mats: &[CMatrix], n: &[f64]) -> CMatrix {
    let d = mats[0].rows();
    let mut out = CMatrix::zeros(d, d);
    for (m, w) in mats.iter().zip(n) {
        if *w != 0.0 {
            out = &out + &m.scale_re(*w);
        }
    }
    out
}

fn check_direction(g: &SymmetryGenerator, n: &[f64]) -> Result<()> {
    if n.len() != g.r_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} direction components", g.r_dim()),
            got: format!("{}", n.len()),
        });
    }
    if n.iter().map(|x| x * x).sum::<f64>() <= 0.0 {
        return Err(Error::InvalidInput("zero direction vector".into()));
    }
    Ok(())
}

/// First-order change of a matrix under the generator along `n` (per unit of
/// the infinitesimal parameter):
/// `i [n·T, rho] + sum_a Delta_a (u rho u† - 1/2 {u†u, rho})`.
pub fn generator_action(g: &SymmetryGenerator, n: &[f64], rho: &CMatrix) -> Result<CMatrix> {
    check_direction(g, n)?;
    if rho.rows() != g.d || rho.cols() != g.d {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", g.d),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    let mut out = commutator(&g.t_along(n), rho).scale(Complex64::new(0.0, 1.0));
    for term in g.noise_terms(n) {
        let jump = term.u.sandwich(rho);
        let uu = term.u.dagger().matmul(&term.u);
        out = &out + &(&jump - &anticommutator(&uu, rho).scale_re(0.5)).scale_re(term.delta);
    }
    Ok(out)
}

/// Per-direction tensors recovered from the noise model at unit directions.
#[derive(Clone, Debug)]
pub struct GeneratorDerived {
    /// noise parts of the kernel derivative, one d^2 x d^2 choi-layout
    /// matrix per direction: `L_r = sum_a Delta_a u_a (x) u_a†`
    pub l: Vec<CMatrix>,
    /// Hermitian traces `[theta_r]_{NM} = sum_{M'} [L_r]_{M'M,M'N}`
    pub theta: Vec<CMatrix>,
    /// `tau_r = T_r - (i/2) theta_r`
    pub tau: Vec<CMatrix>,
}

fn noise_choi(d: usize, terms: &[NoiseTerm]) -> CMatrix {
    let mut out = CMatrix::zeros(d * d, d * d);
    for term in terms {
        out = &out + &kernel_outer(&term.u, &term.u.dagger()).scale_re(term.delta);
    }
    out
}

fn theta_from_l(l: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |nn, mm| {
        (0..d).map(|mp| l[(mp * d + mm, mp * d + nn)]).sum()
    })
}

/// Recover `L_r`, `theta_r`, `tau_r` from the noise model, verifying that
/// the noise part of the derivative really is linear in the direction.
pub fn derive_tensors(g: &SymmetryGenerator) -> Result<GeneratorDerived> {
    let d = g.d;
    let r_dim = g.r_dim();
    let mut l = Vec::with_capacity(r_dim);
    for r in 0..r_dim {
        let mut e = vec![0.0; r_dim];
        e[r] = 1.0;
        let terms = g.noise_terms(&e);
        for term in &terms {
            let tr = term.u.trace().norm();
            if tr > STRUCT_TOL {
                return Err(Error::InvalidInput(format!(
                    "noise matrix at direction {r} has trace {tr:.3e}"
                )));
            }
        }
        l.push(noise_choi(d, &terms));
    }
    // linearity across directions: terms at e_r + e_s must rebuild L_r + L_s
    for r in 0..r_dim {
        for s in (r + 1)..r_dim {
            let mut e = vec![0.0; r_dim];
            e[r] = 1.0;
            e[s] = 1.0;
            let combined = noise_choi(d, &g.noise_terms(&e));
            let dev = combined.max_abs_diff(&(&l[r] + &l[s]));
            if dev > PASS_TOL {
                return Err(Error::LinearityViolation(dev));
            }
        }
    }
    let theta: Vec<CMatrix> = l.iter().map(|lr| theta_from_l(lr, d)).collect();
    for th in &theta {
        let h = th.hermiticity_residual();
        if h > STRUCT_TOL {
            return Err(Error::NotHermitian(h));
        }
    }
    let tau =
        g.t.iter()
            .zip(&theta)
            .map(|(t, th)| t - &th.scale(Complex64::new(0.0, 0.5)))
            .collect();
    Ok(GeneratorDerived { l, theta, tau })
}

impl GeneratorDerived {
    pub fn theta_along(&self, n: &[f64]) -> CMatrix {
        lincomb(&self.theta, n)
    }

    pub fn tau_along(&self, n: &[f64]) -> CMatrix {
        let d = self.tau[0].rows();
        let mut out = CMatrix::zeros(d, d);
        for (m, w) in self.tau.iter().zip(n) {
            if *w != 0.0 {
                out = &out + &m.scale_re(*w);
            }
        }
        out
    }

    pub fn l_along(&self, n: &[f64]) -> CMatrix {
        let dd = self.l[0].rows();
        let mut out = CMatrix::zeros(dd, dd);
        for (m, w) in self.l.iter().zip(n) {
            if *w != 0.0 {
                out = &out + &m.scale_re(*w);
            }
        }
        out
    }
}

/// Residual of the trace identity `sum_a Delta_a(n) u_a†(n) u_a(n) = n·theta`
/// that fixes the anti-Hermitian part of `tau`.
pub fn noise_trace_identity_residual(
    g: &SymmetryGenerator,
    derived: &GeneratorDerived,
    n: &[f64],
) -> Result<f64> {
    check_direction(g, n)?;
    let d = g.d;
    let mut acc = CMatrix::zeros(d, d);
    for term in g.noise_terms(n) {
        acc = &acc + &term.u.dagger().matmul(&term.u).scale_re(term.delta);
    }
    Ok(acc.max_abs_diff(&derived.theta_along(n)))
}

/// Choi-layout first-order kernel along `n`: the linearization
/// `i (n·tau)† (x) 1 - i 1 (x) (n·tau) + sum_a Delta_a u_a (x) u_a†`,
/// so that `identity + eps * first_order_kernel` matches the kernel of the
/// exponentiated generator to O(eps^2).
pub fn first_order_kernel(g: &SymmetryGenerator, n: &[f64]) -> Result<CMatrix> {
    check_direction(g, n)?;
    let derived = derive_tensors(g)?;
    let d = g.d;
    let p = derived.tau_along(n).dagger();
    let eye = CMatrix::identity(d);
    let mut out = kernel_outer(&p, &eye).scale(Complex64::new(0.0, 1.0));
    out = &out + &kernel_outer(&eye, &p.dagger()).scale(Complex64::new(0.0, -1.0));
    out = &out + &noise_choi(d, &g.noise_terms(n));
    Ok(out)
}

/// Max-abs residual of the closure constraint imposed by the group
/// multiplication law on the first-order data, evaluated for the direction
/// pair `(n, nbar)`:
///
/// ```text
/// [G(n), G(nbar)] + sum_r C~^r G_r = 0,   C~^r = sum_{st} C^r_{st} n^s nbar^t
/// ```
///
/// assembled term by term in the kernel-product notation: the commutator of
/// the `tau` blocks, the mixed `tau`–noise commutator terms, the
/// noise–noise commutator/anticommutator double sums, and the
/// structure-constant side contracting `tau` and the per-direction noise
/// tensors `L_r`.
pub fn group_residual(g: &SymmetryGenerator, n: &[f64], nbar: &[f64]) -> Result<f64> {
    check_direction(g, n)?;
    check_direction(g, nbar)?;
    let derived = derive_tensors(g)?;
    let d = g.d;
    let eye = CMatrix::identity(d);
    let i = Complex64::new(0.0, 1.0);

    let p = derived.tau_along(n).dagger();
    let r = derived.tau_along(nbar).dagger();
    let terms_n = g.noise_terms(n);
    let terms_nbar = g.noise_terms(nbar);

    let mut acc = CMatrix::zeros(d * d, d * d);

    // commutator of the tau blocks
    let pr = commutator(&p, &r);
    acc = &acc - &kernel_outer(&pr, &eye);
    acc = &acc - &kernel_outer(&eye, &pr.dagger());

    // mixed tau-noise terms
    for w in &terms_nbar {
        let cw = commutator(&p, &w.u);
        acc = &acc + &kernel_outer(&cw, &w.u.dagger()).scale(i * w.delta);
        acc = &acc - &kernel_outer(&w.u, &cw.dagger()).scale(i * w.delta);
    }
    for u in &terms_n {
        let cu = commutator(&r, &u.u);
        acc = &acc - &kernel_outer(&cu, &u.u.dagger()).scale(i * u.delta);
        acc = &acc + &kernel_outer(&u.u, &cu.dagger()).scale(i * u.delta);
    }

    // noise-noise commutator/anticommutator double sum
    for u in &terms_n {
        for w in &terms_nbar {
            let weight = 0.5 * u.delta * w.delta;
            let comm = commutator(&u.u, &w.u);
            let anti = anticommutator(&u.u, &w.u);
            acc = &acc + &kernel_outer(&comm, &anti.dagger()).scale_re(weight);
            acc = &acc + &kernel_outer(&anti, &comm.dagger()).scale_re(weight);
        }
    }

    // structure-constant side: + sum_r C~^r G_r
    let ctilde = g.sc.contract(n, nbar);
    for (rr, weight) in ctilde.iter().enumerate() {
        if *weight == 0.0 {
            continue;
        }
        let taub = derived.tau[rr].dagger();
        acc = &acc + &kernel_outer(&taub, &eye).scale(i * *weight);
        acc = &acc - &kernel_outer(&eye, &derived.tau[rr]).scale(i * *weight);
        acc = &acc + &derived.l[rr].scale_re(*weight);
    }

    Ok(acc.max_abs())
}

struct TracelessShift {
    base: Arc<dyn NoiseModel>,
}

impl NoiseModel for TracelessShift {
    fn terms(&self, n: &[f64]) -> Vec<NoiseTerm> {
        self.base
            .terms(n)
            .into_iter()
            .map(|term| {
                let d = term.u.rows();
                let shift = term.u.trace() / Complex64::new(d as f64, 0.0);
                NoiseTerm {
                    delta: term.delta,
                    u: &term.u - &CMatrix::identity(d).scale(shift),
                }
            })
            .collect()
    }
}

/// Remove traces from the noise matrices without changing the generator's
/// action: `u -> u - (Tr u / d) 1`, compensated by the Hermitian shift
/// `T_r -> T_r + (i/2) sum_a Delta_a (cbar_a u_a - c_a u_a†)` with
/// `c_a = -Tr(u_a)/d`. Already-traceless input comes back unchanged.
pub fn canonicalize(g: &SymmetryGenerator) -> Result<SymmetryGenerator> {
    let d = g.d;
    let r_dim = g.r_dim();
    let mut new_t = Vec::with_capacity(r_dim);
    let mut any_trace = false;
    for r in 0..r_dim {
        let mut e = vec![0.0; r_dim];
        e[r] = 1.0;
        let mut shift = CMatrix::zeros(d, d);
        for term in g.noise_terms(&e) {
            let c = -term.u.trace() / Complex64::new(d as f64, 0.0);
            if c.norm() > 1e-14 {
                any_trace = true;
            }
            let part = &term.u.scale(c.conj()) - &term.u.dagger().scale(c);
            shift = &shift + &part.scale(Complex64::new(0.0, 0.5) * term.delta);
        }
        new_t.push((&g.t[r] + &shift).hermitian_part());
    }
    if !any_trace {
        return Ok(g.clone());
    }
    SymmetryGenerator::new(
        new_t,
        g.sc.clone(),
        Arc::new(TracelessShift {
            base: Arc::clone(&g.noise),
        }),
    )
}

/// Sampled validation of the noise-model contract at the unit directions:
/// tracelessness, orthonormality, and positive scaling of the strengths.
pub fn check_noise_contract(g: &SymmetryGenerator) -> Result<()> {
    let r_dim = g.r_dim();
    for r in 0..r_dim {
        let mut e = vec![0.0; r_dim];
        e[r] = 1.0;
        let terms = g.noise_terms(&e);
        for (a, ta) in terms.iter().enumerate() {
            if ta.u.trace().norm() > STRUCT_TOL {
                return Err(Error::InvalidInput(format!(
                    "noise matrix ({r},{a}) is not traceless"
                )));
            }
            for (b, tb) in terms.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                if (ta.u.inner(&tb.u) - Complex64::new(want, 0.0)).norm() > 1e-8 {
                    return Err(Error::InvalidInput(format!(
                        "noise matrices ({r},{a}) and ({r},{b}) are not orthonormal"
                    )));
                }
            }
        }
        // positive scaling of the strengths
        let scaled = g.noise_terms(&e.iter().map(|x| 3.0 * x).collect::<Vec<_>>());
        let sum: f64 = terms.iter().map(|t| t.delta).sum();
        let sum3: f64 = scaled.iter().map(|t| t.delta).sum();
        if (sum3 - 3.0 * sum).abs() > 1e-9 * (1.0 + sum.abs()) {
            return Err(Error::InvalidInput(format!(
                "noise strengths at direction {r} do not scale linearly"
            )));
        }
    }
    Ok(())
}

/// Report of the special identities holding for families whose kernels are
/// unitary as d^2-dimensional linear maps (every compact-group family, in a
/// suitable basis).
#[derive(Clone, Debug)]
pub struct CompactReport {
    /// worst transfer-layout unitarity residual among the sampled members
    pub transfer_unitarity: f64,
    /// worst deviation of g(1/d) from 1/d among the sampled members
    pub center_invariance: f64,
    /// worst max-abs of n·theta over the sampled directions
    pub theta_residual: f64,
    /// worst residual of the first-order unitarity identity
    /// `n·theta (x) 1 + 1 (x) n·theta = sum_a Delta_a (u (x) u† + u† (x) u)`
    pub noise_balance_residual: f64,
    pub pass: bool,
}

/// Verify the compact-family identities on sampled members and directions:
/// transfer unitarity, invariance of the maximally mixed state, vanishing of
/// `n·theta` (hence `tau = T`), and the first-order unitarity identity.
pub fn compact_checks(
    members: &[Kernel],
    g: &SymmetryGenerator,
    seed: u64,
) -> Result<CompactReport> {
    let d = g.d;
    let derived = derive_tensors(g)?;
    let mut transfer_unitarity = 0.0f64;
    let mut center_invariance = 0.0f64;
    let center = CMatrix::identity(d).scale_re(1.0 / d as f64);
    for k in members {
        let resid = k.transfer().unitarity_residual();
        if resid > PASS_TOL {
            return Err(Error::NonUnitaryFamily(resid));
        }
        transfer_unitarity = transfer_unitarity.max(resid);
        center_invariance = center_invariance.max(k.apply(&center)?.max_abs_diff(&center));
    }

    let mut theta_residual = 0.0f64;
    let mut noise_balance_residual = 0.0f64;
    let mut rng = rng_from_seed(seed);
    let eye = CMatrix::identity(d);
    for sample in 0..(g.r_dim() + 4) {
        let n: Vec<f64> = if sample < g.r_dim() {
            (0..g.r_dim()).map(|r| (r == sample) as u8 as f64).collect()
        } else {
            (0..g.r_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        if n.iter().map(|x| x * x).sum::<f64>() <= 1e-12 {
            continue;
        }
        let th = derived.theta_along(&n);
        theta_residual = theta_residual.max(th.max_abs());
        let mut balance = &kernel_outer(&th, &eye) + &kernel_outer(&eye, &th);
        for term in g.noise_terms(&n) {
            let fwd = kernel_outer(&term.u, &term.u.dagger());
            let bwd = kernel_outer(&term.u.dagger(), &term.u);
            balance = &balance - &(&fwd + &bwd).scale_re(term.delta);
        }
        noise_balance_residual = noise_balance_residual.max(balance.max_abs());
    }

    Ok(CompactReport {
        transfer_unitarity,
        center_invariance,
        theta_residual,
        noise_balance_residual,
        pass: center_invariance <= 1e-9 && theta_residual <= PASS_TOL,
    })
}

/// A state/null-vector pair witnessing first-order positivity violation.
#[derive(Clone, Debug)]
pub struct PositivityWitness {
    /// unit vector annihilated by the state
    pub v: CMatrix,
    /// positive matrix with `rho v = 0`, rank d-1
    pub rho: CMatrix,
    /// the nonzero coefficient `sum_a Delta_a v† u_a rho u_a† v`
    pub coefficient: f64,
    /// sign of the infinitesimal parameter that drives the state negative
    pub eps_sign: f64,
    /// minimum eigenvalue of `rho + eps * drho` at `eps = eps_sign * 1e-3`
    pub min_eigenvalue: f64,
}

/// The expectation `sum_a Delta_a(n) v† u_a rho u_a† v` controlling
/// first-order positivity at a zero eigenvector `v` of `rho`.
pub fn probe_coefficient(
    g: &SymmetryGenerator,
    n: &[f64],
    v: &CMatrix,
    rho: &CMatrix,
) -> Result<f64> {
    check_direction(g, n)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for term in g.noise_terms(n) {
        let uv = term.u.dagger().matmul(v);
        acc += uv.dagger().matmul(&rho.matmul(&uv)).trace() * term.delta;
    }
    Ok(acc.re)
}

/// Search for a positivity-breaking witness: random unit vectors `v` and
/// random rank-(d-1) positive states with `rho v = 0`. When the coefficient
/// is nonzero, one sign of the infinitesimal parameter makes the transformed
/// state non-positive; the witness records that verification. `None` after
/// all trials is consistent with a purely unitary (all-Delta-zero) generator.
pub fn positivity_probe(
    g: &SymmetryGenerator,
    n: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Option<PositivityWitness>> {
    check_direction(g, n)?;
    let d = g.d;
    for trial in 0..trials {
        let mut rng = rng_for_trial(seed, trial as u64);
        let v = random_unit_column(d, &mut rng);
        let rho = random_density_with_null_vector(&v, &mut rng);
        let coefficient = probe_coefficient(g, n, &v, &rho)?;
        if coefficient.abs() <= PASS_TOL {
            continue;
        }
        let eps_sign = -coefficient.signum();
        let drho = generator_action(g, n, &rho)?;
        let shifted = &rho + &drho.scale_re(1e-3 * eps_sign);
        let min_eigenvalue = min_eigenvalue(&shifted.hermitian_part())?;
        if min_eigenvalue >= 0.0 {
            return Err(Error::ContractViolation(format!(
                "witness coefficient {coefficient:.3e} did not drive the state negative"
            )));
        }
        return Ok(Some(PositivityWitness {
            v,
            rho,
            coefficient,
            eps_sign,
            min_eigenvalue,
        }));
    }
    Ok(None)
}

/// Build a commuting-family generator: diagonal `T_r` from `diag_t`,
/// diagonal noise matrices from `diag_u` with strengths
/// `Delta_a(n) = (sum_r n^r) deltas[a]`, and an abelian algebra. The closure
/// constraint holds with every term vanishing identically, yet for nonzero
/// `deltas` the action is not a unitary conjugation.
pub fn build_section5(
    d: usize,
    diag_t: &[Vec<f64>],
    diag_u: &[Vec<Complex64>],
    deltas: &[f64],
) -> Result<SymmetryGenerator> {
    if diag_u.len() != deltas.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} noise strengths", diag_u.len()),
            got: format!("{}", deltas.len()),
        });
    }
    let t: Vec<CMatrix> = diag_t
        .iter()
        .map(|row| {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d} diagonal entries"),
                    got: format!("{}", row.len()),
                });
            }
            Ok(CMatrix::diag_real(row))
        })
        .collect::<Result<_>>()?;
    let us: Vec<CMatrix> = diag_u
        .iter()
        .map(|row| {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d} diagonal entries"),
                    got: format!("{}", row.len()),
                });
            }
            Ok(CMatrix::diag(row))
        })
        .collect::<Result<_>>()?;
    for (a, u) in us.iter().enumerate() {
        if u.trace().norm() > STRUCT_TOL {
            return Err(Error::InvalidInput(format!(
                "noise diagonal {a} is not traceless"
            )));
        }
        for (b, other) in us.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            if (u.inner(other) - Complex64::new(want, 0.0)).norm() > STRUCT_TOL {
                return Err(Error::InvalidInput(format!(
                    "noise diagonals {a}, {b} are not orthonormal"
                )));
            }
        }
    }
    let noise = SharedBasisNoise {
        deltas: deltas.to_vec(),
        us,
    };
    SymmetryGenerator::new(t, StructureConstants::zero(diag_t.len()), Arc::new(noise))
}

/// The entrywise rate of the commuting family: on a diagonal-basis entry
/// `rho_{MN}` the action is multiplication by
/// `i n·(T_M - T_N) + sum_a Delta_a(n) [u_{aM} conj(u_{aN})
///  - |u_{aM}|^2 / 2 - |u_{aN}|^2 / 2]`.
pub fn section5_multiplier(g: &SymmetryGenerator, n: &[f64], row: usize, col: usize) -> Complex64 {
    let t = g.t_along(n);
    let mut mult = Complex64::new(0.0, 1.0) * (t[(row, row)] - t[(col, col)]);
    for term in g.noise_terms(n) {
        let um = term.u[(row, row)];
        let un = term.u[(col, col)];
        mult += Complex64::new(term.delta, 0.0)
            * (um * un.conj() - Complex64::new(0.5 * (um.norm_sqr() + un.norm_sqr()), 0.0));
    }
    mult
}

/// The spin-1/2 rotation generator: `T = sigma/2`, Levi-Civita structure
/// constants, no noise.
pub fn su2_generator() -> SymmetryGenerator {
    let sx = CMatrix::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)],
    ]);
    let sy = CMatrix::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -0.5)],
        vec![Complex64::new(0.0, 0.5), Complex64::new(0.0, 0.0)],
    ]);
    let sz = CMatrix::diag_real(&[0.5, -0.5]);
    SymmetryGenerator::new(
        vec![sx, sy, sz],
        StructureConstants::su2(),
        Arc::new(NoNoise),
    )
    .expect("spin generator data is valid")
}

/// Halved Gell-Mann matrices: an orthogonal Hermitian traceless basis of the
/// three-level algebra with `Tr(X_r X_s) = delta_{rs} / 2`.
pub fn gell_mann_halves() -> Vec<CMatrix> {
    let z = Complex64::new(0.0, 0.0);
    let h = Complex64::new(0.5, 0.0);
    let ih = Complex64::new(0.0, 0.5);
    let s3 = 0.5 / 3f64.sqrt();
    vec![
        CMatrix::from_rows(&[vec![z, h, z], vec![h, z, z], vec![z, z, z]]),
        CMatrix::from_rows(&[vec![z, -ih, z], vec![ih, z, z], vec![z, z, z]]),
        CMatrix::diag_real(&[0.5, -0.5, 0.0]),
        CMatrix::from_rows(&[vec![z, z, h], vec![z, z, z], vec![h, z, z]]),
        CMatrix::from_rows(&[vec![z, z, -ih], vec![z, z, z], vec![ih, z, z]]),
        CMatrix::from_rows(&[vec![z, z, z], vec![z, z, h], vec![z, h, z]]),
        CMatrix::from_rows(&[vec![z, z, z], vec![z, z, -ih], vec![z, ih, z]]),
        CMatrix::diag_real(&[s3, s3, -2.0 * s3]),
    ]
}

/// A member of the three-level off-diagonal-mixing family at group
/// parameter `a`: the kernel of `su3_example_kernel(exp(i a·X))` with `X`
/// the halved Gell-Mann matrices.
pub fn su3_family_member(a: &[f64]) -> Result<Kernel> {
    let x = gell_mann_halves();
    if a.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} parameters", x.len()),
            got: format!("{}", a.len()),
        });
    }
    su3_example_kernel(&unitary_exp(&lincomb(&x, a), 1.0)?)
}

/// Choi-layout derivative of the three-level family along the direction
/// whose rotation generator is `x`: the off-diagonal triplet picks up
/// `i x`, its conjugate sector the conjugate, the diagonal stays put.
fn su3_first_order(x: &CMatrix) -> CMatrix {
    use crate::channels::SU3_B_POSITIONS;
    let d = 3;
    let mut c = CMatrix::zeros(9, 9);
    let i = Complex64::new(0.0, 1.0);
    for j in 0..3 {
        let (rj, cj) = SU3_B_POSITIONS[j];
        for k in 0..3 {
            let (rk, ck) = SU3_B_POSITIONS[k];
            c[(rj * d + rk, cj * d + ck)] = i * x[(j, k)];
            c[(cj * d + ck, rj * d + rk)] = (i * x[(j, k)]).conj();
        }
    }
    c
}

/// Noise extracted from the family's kernel derivative: project out the
/// identity eigenmatrix and diagonalize the remainder.
struct Su3FamilyNoise {
    c_dirs: Vec<CMatrix>,
}

impl Su3FamilyNoise {
    fn derivative(&self, n: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(9, 9);
        for (c, w) in self.c_dirs.iter().zip(n) {
            if *w != 0.0 {
                out = &out + &c.scale_re(*w);
            }
        }
        out
    }
}

fn identity_projector(d: usize) -> CMatrix {
    let v0 = CMatrix::identity(d).vec().scale_re(1.0 / (d as f64).sqrt());
    &CMatrix::identity(d * d) - &v0.matmul(&v0.dagger())
}

impl NoiseModel for Su3FamilyNoise {
    fn terms(&self, n: &[f64]) -> Vec<NoiseTerm> {
        let d = 3;
        let q = identity_projector(d);
        let projected = q.matmul(&self.derivative(n)).matmul(&q);
        let eig = hermitian_eigen(&projected).expect("projected derivative is Hermitian");
        let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        eig.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 1e-12 * scale)
            .map(|(k, v)| NoiseTerm {
                delta: *v,
                u: CMatrix::unvec(&eig.vector(k), d, d),
            })
            .collect()
    }
}

/// The generator of the three-level off-diagonal-mixing family, with `T_r`
/// recovered from the family's first-order kernels and structure constants
/// taken from the halved Gell-Mann basis. The `T_r` do **not** close under
/// commutation — the closure constraint is satisfied only through the noise
/// terms.
pub fn su3_family_generator() -> SymmetryGenerator {
    let x = gell_mann_halves();
    let d = 3;
    let c_dirs: Vec<CMatrix> = x.iter().map(su3_first_order).collect();
    let q = identity_projector(d);
    let v0 = CMatrix::identity(d).vec().scale_re(1.0 / (d as f64).sqrt());
    let sqrt_d = (d as f64).sqrt();
    let t: Vec<CMatrix> = c_dirs
        .iter()
        .map(|c| {
            // tau(e_r)† = -(i/sqrt d) mat(Q C v0) + (i/2d)(sum Delta) 1;
            // the strength sum is Tr(QCQ), zero for this family
            let trace_sum = {
                let qcq = q.matmul(c).matmul(&q);
                qcq.trace().re
            };
            let p = CMatrix::unvec(&q.matmul(&c.matmul(&v0)), d, d)
                .scale(Complex64::new(0.0, -1.0 / sqrt_d));
            let p =
                &p + &CMatrix::identity(d).scale(Complex64::new(0.0, trace_sum / (2.0 * d as f64)));
            p.dagger().hermitian_part()
        })
        .collect();
    let sc = StructureConstants::from_generators(&x).expect("halved Gell-Mann basis closes");
    SymmetryGenerator::new(t, sc, Arc::new(Su3FamilyNoise { c_dirs }))
        .expect("family first-order data is valid")
}

/// A single-direction generator with prescribed Hermitian `T` and one table
/// of noise terms — the time-translation shape.
pub fn single_direction_generator(t: CMatrix, terms: Vec<NoiseTerm>) -> Result<SymmetryGenerator> {
    SymmetryGenerator::new(
        vec![t],
        StructureConstants::zero(1),
        Arc::new(TableNoise::new(vec![terms])),
    )
}
