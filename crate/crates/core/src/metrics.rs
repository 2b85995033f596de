//! Trace distance and fidelity.

use crate::eig::eig_hermitian_matrix;
use crate::error::{QError, Result};
use crate::operator::CMatrix;
use crate::state::{DensityOperator, StateVector};

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(QError::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// `Σ|λ|` over the spectrum of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    eig_hermitian_matrix(m).values.iter().map(|v| v.abs()).sum()
}

/// `½ Σ |eig(ρ − σ)|`
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho.dim(), sigma.dim())?;
    Ok((0.5 * trace_norm(&(rho.matrix() - sigma.matrix()))).clamp(0.0, 1.0))
}

/// `√(1 − |⟨ψ|φ⟩|²)`
pub fn trace_distance_pure(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    let ov = psi.inner(phi)?.norm_sqr();
    Ok((1.0 - ov).max(0.0).sqrt())
}

/// Positive square root of a PSD matrix (negative round-off clipped).
pub(crate) fn psd_sqrt(m: &CMatrix) -> CMatrix {
    eig_hermitian_matrix(m).map(|v| v.max(0.0).sqrt())
}

/// `tr √(√ρ σ √ρ)`, computed from the spectrum of `√ρ σ √ρ`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho.dim(), sigma.dim())?;
    let s = psd_sqrt(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let f: f64 = eig_hermitian_matrix(&inner)
        .values
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `|⟨ψ|φ⟩|`
pub fn fidelity_pure(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm().min(1.0))
}
