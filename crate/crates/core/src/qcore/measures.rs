//! Scalar figures of merit for density matrices.

use super::density::DensityMatrix;
use super::linalg::{self, CMat};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Eigenvalues below this are treated as numerical zeros when forming the
/// decomposition used by [`concurrence`].
const RANK_FLOOR: f64 = 1e-13;

/// Wootters concurrence of a two-qubit state.
///
/// The decreasing square roots `λᵢ` of the spectrum of `ρ(σy⊗σy)ρ*(σy⊗σy)`
/// are the singular values of `τ_ij = ⟨vᵢ|σy⊗σy|vⱼ*⟩`, where the subnormalized
/// vectors `vᵢ = √μᵢ eᵢ` decompose `ρ`. Going through `τ` avoids taking square
/// roots of near-zero eigenvalues.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let (mu, vecs) = linalg::eigh(rho.matrix());
    let yy = linalg::kron(&linalg::pauli_y(), &linalg::pauli_y());
    let support: Vec<nalgebra::DVector<Complex64>> = mu
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > RANK_FLOOR)
        .map(|(k, &m)| vecs.column(k).scale(m.sqrt()))
        .collect();
    if support.is_empty() {
        return Ok(0.0);
    }
    let r = support.len();
    let tau = CMat::from_fn(r, r, |i, j| {
        let flipped = &yy * support[j].conjugate();
        support[i].dotc(&flipped)
    });
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let c = s[0] - s[1..].iter().sum::<f64>();
    Ok(c.clamp(0.0, 1.0))
}

/// `⟨ψ|ρ|ψ⟩` for a normalized `ψ`.
pub fn fidelity_to(rho: &DensityMatrix, psi: &[Complex64]) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: psi.len() });
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidState(format!("target vector has squared norm {norm}")));
    }
    let m = rho.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, a) in psi.iter().enumerate() {
        for (j, b) in psi.iter().enumerate() {
            acc += a.conj() * m[(i, j)] * b;
        }
    }
    Ok(acc.re)
}

/// `tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Half the trace norm of `ρ − σ`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    Ok(trace_norm_half(&(rho.matrix() - sigma.matrix())))
}

pub(crate) fn trace_norm_half(diff: &CMat) -> f64 {
    0.5 * linalg::eigvalsh(diff).iter().map(|l| l.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::c;
    use crate::qcore::states::{self, phi_plus, phi_plus_vector, RandomKind};

    /// Closed form for X-shaped states: `2·max(0, |ρ₀₃| − √(ρ₁₁ρ₂₂), |ρ₁₂| − √(ρ₀₀ρ₃₃))`.
    fn x_state_concurrence(rho: &DensityMatrix) -> f64 {
        let g = |i: usize, j: usize| rho.get(i, j);
        let a = g(0, 3).norm() - (g(1, 1).re * g(2, 2).re).sqrt();
        let b = g(1, 2).norm() - (g(0, 0).re * g(3, 3).re).sqrt();
        2.0 * a.max(b).max(0.0)
    }

    /// Square roots of the eigenvalues of the non-Hermitian product, computed
    /// with a general eigen solver.
    fn eigenvalue_concurrence(rho: &DensityMatrix) -> f64 {
        let yy = linalg::kron(&linalg::pauli_y(), &linalg::pauli_y());
        let tilde = &yy * rho.matrix().map(|z| z.conj()) * &yy;
        let prod = rho.matrix() * tilde;
        let eig = prod.eigenvalues().expect("complex eigenvalues");
        let mut l: Vec<f64> = eig.iter().map(|z| z.re.max(0.0).sqrt()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        (l[0] - l[1] - l[2] - l[3]).max(0.0)
    }

    #[test]
    fn concurrence_endpoints() {
        assert!((concurrence(&phi_plus()).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(concurrence(&mixed).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dephased_bell_concurrence_equals_visibility() {
        let rho = states::dephased_phi_plus(0.979);
        let c_impl = concurrence(&rho).unwrap();
        assert!((x_state_concurrence(&rho) - 0.979).abs() < 1e-15);
        assert!((eigenvalue_concurrence(&rho) - 0.979).abs() < 1e-7);
        assert!((c_impl - 0.979).abs() < 1e-12);
    }

    #[test]
    fn concurrence_matches_eigenvalue_route_on_full_rank_states() {
        for seed in 0..30 {
            let rho = states::random_state(2, RandomKind::Mixed, seed).unwrap();
            let a = concurrence(&rho).unwrap();
            let b = eigenvalue_concurrence(&rho);
            assert!((a - b).abs() < 1e-7, "seed {seed}: {a} vs {b}");
        }
    }

    #[test]
    fn concurrence_rejects_wrong_dimension() {
        let rho = DensityMatrix::maximally_mixed(8).unwrap();
        assert!(concurrence(&rho).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let phi = phi_plus_vector();
        assert!((fidelity_to(&phi_plus(), &phi).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((fidelity_to(&mixed, &phi).unwrap() - 0.25).abs() < 1e-12);
        let deph = states::dephased_phi_plus(0.979);
        assert!((fidelity_to(&deph, &phi).unwrap() - 0.9895).abs() < 1e-12);
        assert!(fidelity_to(&mixed, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn purity_and_distance_examples() {
        assert!((purity(&phi_plus()) - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((purity(&mixed) - 0.25).abs() < 1e-12);
        assert!(trace_distance(&mixed, &mixed).unwrap().abs() < 1e-15);
        let h = DensityMatrix::basis(2, 0).unwrap();
        let v = DensityMatrix::basis(2, 1).unwrap();
        assert!((trace_distance(&h, &v).unwrap() - 1.0).abs() < 1e-15);
    }
}
