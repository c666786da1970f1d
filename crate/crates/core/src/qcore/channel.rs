use super::linalg::{self, CMat};
use crate::error::{Error, Result};

const COMPLETENESS_TOL: f64 = 1e-12;

/// A completely positive map given by Kraus operators.
///
/// Trace-preserving channels satisfy `Σ K†K = 1`. Postselecting channels
/// only need `Σ K†K ≤ 1`; the missing mass is what postselection discards.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<CMat>,
    trace_preserving: bool,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMat>, trace_preserving: bool) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let dim = first.nrows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidChannel(format!("Kraus dimension {dim} is not a power of two")));
        }
        if let Some(k) = kraus.iter().find(|k| k.nrows() != dim || k.ncols() != dim) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operator of shape {}x{} in a {dim}-dimensional channel",
                k.nrows(),
                k.ncols()
            )));
        }
        let gram = kraus.iter().fold(CMat::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        if trace_preserving {
            let residual = linalg::max_abs(&(&gram - linalg::identity(dim)));
            if residual > COMPLETENESS_TOL {
                return Err(Error::InvalidChannel(format!("Σ K†K deviates from identity by {residual:.3e}")));
            }
        } else {
            let largest = *linalg::eigvalsh(&gram).last().unwrap();
            if largest > 1.0 + COMPLETENESS_TOL {
                return Err(Error::InvalidChannel(format!("Σ K†K has eigenvalue {largest} > 1")));
            }
        }
        Ok(Self { kraus, trace_preserving })
    }

    pub fn unitary(u: CMat) -> Result<Self> {
        let residual = linalg::unitarity_residual(&u);
        if residual > COMPLETENESS_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Self::new(vec![u], true)
    }

    /// Single-qubit depolarizer `ρ → (1−p)ρ + p·I/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!("depolarizing strength {p} outside [0, 1]")));
        }
        let k0 = linalg::identity(2).scale((1.0 - 0.75 * p).sqrt());
        let s = (p / 4.0).sqrt();
        let kraus = vec![k0, linalg::pauli_x().scale(s), linalg::pauli_y().scale(s), linalg::pauli_z().scale(s)];
        Self::new(kraus, true)
    }

    /// Single-qubit phase damping that multiplies the off-diagonal elements by `coherence`.
    pub fn phase_damping(coherence: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&coherence) {
            return Err(Error::InvalidChannel(format!("coherence {coherence} outside [0, 1]")));
        }
        let k0 = linalg::identity(2).scale(((1.0 + coherence) / 2.0).sqrt());
        let k1 = linalg::pauli_z().scale(((1.0 - coherence) / 2.0).sqrt());
        Self::new(vec![k0, k1], true)
    }

    /// Postselecting single-operator channel `ρ → PρP`.
    pub fn projection(projector: CMat) -> Result<Self> {
        Self::new(vec![projector], false)
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }
}
