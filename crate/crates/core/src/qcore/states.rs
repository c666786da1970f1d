//! Frequently used states and gates.

use super::density::DensityMatrix;
use super::linalg::{self, c, CMat};
use crate::error::Result;
use crate::rng::{stage, substream};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus_vector() -> [Complex64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [c(s, 0.0), linalg::ZERO, linalg::ZERO, c(s, 0.0)]
}

/// `(|00⟩ + e^{iφ}|11⟩)/√2`.
pub fn phi_phase_vector(phase: f64) -> [Complex64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [c(s, 0.0), linalg::ZERO, linalg::ZERO, Complex64::from_polar(s, phase)]
}

pub fn phi_plus() -> DensityMatrix {
    DensityMatrix::pure(&phi_plus_vector()).expect("valid Bell state")
}

/// `V·|Φ⁺⟩⟨Φ⁺| + (1−V)/2·(|00⟩⟨00| + |11⟩⟨11|)`.
pub fn dephased_phi_plus(visibility: f64) -> DensityMatrix {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = c(0.5, 0.0);
    m[(3, 3)] = c(0.5, 0.0);
    m[(0, 3)] = c(visibility / 2.0, 0.0);
    m[(3, 0)] = c(visibility / 2.0, 0.0);
    DensityMatrix::from_matrix(m).expect("dephased Bell state for visibility in [0, 1]")
}

/// `|k⟩⟨k|` on one qubit.
pub fn projector_1q(k: usize) -> CMat {
    let mut p = CMat::zeros(2, 2);
    p[(k, k)] = linalg::ONE;
    p
}

/// Controlled NOT, control is the first (most significant) qubit.
pub fn cnot() -> CMat {
    let o = linalg::ONE;
    let z = linalg::ZERO;
    CMat::from_row_slice(4, 4, &[o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z])
}

/// `diag(1, e^{iφ})`.
pub fn phase_gate(phase: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[linalg::ONE, linalg::ZERO, linalg::ZERO, Complex64::from_polar(1.0, phase)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    /// Haar-random pure state.
    Pure,
    /// Random convex mixture of `dim` Haar-random pure states.
    Mixed,
}

/// Haar-random amplitudes from a seeded generator.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn random_state_with<R: Rng + ?Sized>(n_qubits: usize, kind: RandomKind, rng: &mut R) -> Result<DensityMatrix> {
    let dim = 1usize << n_qubits;
    match kind {
        RandomKind::Pure => DensityMatrix::pure(&haar_vector(dim, rng)),
        RandomKind::Mixed => {
            let mut acc = CMat::zeros(dim, dim);
            for _ in 0..dim {
                let w: f64 = rng.random::<f64>() + 1e-3;
                acc += linalg::outer(&haar_vector(dim, rng)).scale(w);
            }
            DensityMatrix::from_positive(acc, 1.0)
        }
    }
}

/// Deterministic random state for `seed`.
pub fn random_state(n_qubits: usize, kind: RandomKind, seed: u64) -> Result<DensityMatrix> {
    let mut rng = substream(seed, stage::RANDOM_STATE, n_qubits as u64);
    random_state_with(n_qubits, kind, &mut rng)
}
