//! Kernels on a two-factor system built as products of single-factor kernels,
//! and the reduced-action check: when the joint map factorizes, the first
//! subsystem's evolution is fixed by its own reduced state alone, no matter
//! what the second factor's map does — even on entangled input.

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, CMatrix, TraceSide};
use crate::states::DensityMatrix;

use super::Kernel;

/// Product kernel on the combined system:
/// `K_{(m'a')(ma),(n'b')(nb)} = K1_{m'm,n'n} * K2_{a'a,b'b}`,
/// with combined indices first-factor-major (`M = m*d2 + a`).
pub fn kernel_factor_product(first: &Kernel, second: &Kernel) -> Result<Kernel> {
    let d1 = first.dim();
    let d2 = second.dim();
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
                    let v1 = first.choi()[(mp * d1 + m, np * d1 + n)];
                    if v1.norm_sqr() == 0.0 {
                        continue;
                    }
                    for ap in 0..d2 {
                        for a in 0..d2 {
                            for bp in 0..d2 {
                                for b in 0..d2 {
                                    let v2 = second.choi()[(ap * d2 + a, bp * d2 + b)];
                                    if v2.norm_sqr() == 0.0 {
                                        continue;
                                    }
                                    let row = (mp * d2 + ap) * big + (m * d2 + a);
                                    let col = (np * d2 + bp) * big + (n * d2 + b);
                                    choi[(row, col)] = v1 * v2;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Kernel::from_choi(big, choi)
}

/// A joint kernel known to factor into single-subsystem kernels, carrying the
/// factors alongside the combined map.
#[derive(Clone, Debug)]
pub struct FactorizedKernel {
    first: Kernel,
    second: Kernel,
    combined: Kernel,
}

impl FactorizedKernel {
    /// Build the joint kernel as the product of the two factors; factorized
    /// by construction.
    pub fn new(first: Kernel, second: Kernel) -> Result<Self> {
        let combined = kernel_factor_product(&first, &second)?;
        Ok(FactorizedKernel {
            first,
            second,
            combined,
        })
    }

    /// Accept an externally supplied joint kernel only if it really is the
    /// product of the claimed factors (entrywise to 1e-10).
    pub fn from_parts_checked(first: Kernel, second: Kernel, combined: Kernel) -> Result<Self> {
        let product = kernel_factor_product(&first, &second)?;
        let residual = product.choi().max_abs_diff(combined.choi());
        if residual > super::STRUCT_TOL {
            return Err(Error::NonFactorized(residual));
        }
        Ok(FactorizedKernel {
            first,
            second,
            combined,
        })
    }

    pub fn first(&self) -> &Kernel {
        &self.first
    }

    pub fn second(&self) -> &Kernel {
        &self.second
    }

    pub fn combined(&self) -> &Kernel {
        &self.combined
    }
}

/// Outcome of the reduced-action comparison on one joint state.
#[derive(Clone, Debug)]
pub struct ReducedActionReport {
    /// Tr_2 of the joint image.
    pub reduced_image: CMatrix,
    /// First-factor kernel applied to Tr_2 of the input.
    pub local_image: CMatrix,
    /// max-abs difference between the two.
    pub max_deviation: f64,
    /// deviation within 1e-9
    pub pass: bool,
}

/// Compare the two routes to the evolved first-subsystem state:
/// `Tr_2[g(rho)]` versus `g_1[Tr_2 rho]`. For a factorized kernel whose
/// second factor preserves the trace, the two agree for every joint state,
/// entangled or not — operations confined to the second factor cannot move
/// the first factor's reduced state.
pub fn reduced_action(k: &FactorizedKernel, rho: &DensityMatrix) -> Result<ReducedActionReport> {
    let d1 = k.first.dim();
    let d2 = k.second.dim();
    if rho.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", d1 * d2),
            got: format!("dimension {}", rho.dim()),
        });
    }
    let joint_image = k.combined.apply(rho.matrix())?;
    let reduced_image = partial_trace(&joint_image, TraceSide::Second, d1, d2);
    let reduced_input = partial_trace(rho.matrix(), TraceSide::Second, d1, d2);
    let local_image = k.first.apply(&reduced_input)?;
    let max_deviation = reduced_image.max_abs_diff(&local_image);
    Ok(ReducedActionReport {
        reduced_image,
        local_image,
        max_deviation,
        pass: max_deviation <= 1e-9,
    })
}
