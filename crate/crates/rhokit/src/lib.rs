//! Density-matrix toolkit: symmetry kernels acting directly on density
//! matrices, their spectral/Kraus structure, Lie-group constraint checks,
//! Lindblad flows, and ensemble steering.
//!
//! The crate treats the density matrix as the primary object. A symmetry is a
//! linear kernel `K` acting entrywise, `g(rho)_{M'N'} = sum K_{M'M,N'N}
//! rho_{MN}`, constrained to preserve Hermiticity and trace but not assumed to
//! come from conjugation by a unitary. Modules:
//!
//! - [`linalg`]: complex dense matrices, Hermitian eigensolves, seeded sampling;
//! - [`states`]: density matrices, ensembles, observables;
//! - [`channels`]: kernels in choi/transfer layout, spectra, Kraus forms,
//!   complete-positivity analysis, ancilla extension;
//! - [`generators`]: infinitesimal symmetries with per-direction noise,
//!   derived tensors, group-law residuals, positivity probes;
//! - [`lindblad`]: the induced master equation and its integrator;
//! - [`steering`]: purifications, ensemble relations, remote steering.

pub mod channels;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod lindblad;
pub mod states;
pub mod steering;

pub use error::{Error, Result};
pub use num_complex::Complex64;
