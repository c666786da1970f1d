use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::DensityMatrix;

/// Analyzer angles of the CHSH combination, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshAngles {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub beta: f64,
    pub beta_prime: f64,
}

impl Default for ChshAngles {
    /// 0°, 45°, 22.5°, 67.5°.
    fn default() -> Self {
        Self {
            alpha: 0.0,
            alpha_prime: 45f64.to_radians(),
            beta: 22.5f64.to_radians(),
            beta_prime: 67.5f64.to_radians(),
        }
    }
}

/// `cos(2θ)σz + sin(2θ)σx`: ±1 on linear polarization at `θ` and `θ + 90°`.
pub fn linear_pauli(theta: f64) -> CMat {
    let (s, c) = (2.0 * theta).sin_cos();
    linalg::pauli_z().scale(c) + linalg::pauli_x().scale(s)
}

/// `⟨σ_a ⊗ σ_b⟩`.
pub fn correlation(rho: &DensityMatrix, a: f64, b: f64) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let op = linalg::kron(&linear_pauli(a), &linear_pauli(b));
    Ok(linalg::trace(&(rho.matrix() * op)).re)
}

/// `E(α,β) − E(α,β′) + E(α′,β) + E(α′,β′)`.
pub fn chsh_value(rho: &DensityMatrix, angles: &ChshAngles) -> Result<f64> {
    let e = |a, b| correlation(rho, a, b);
    Ok(e(angles.alpha, angles.beta)? - e(angles.alpha, angles.beta_prime)?
        + e(angles.alpha_prime, angles.beta)?
        + e(angles.alpha_prime, angles.beta_prime)?)
}
