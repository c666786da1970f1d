use super::linalg::{self, CMat};
use crate::error::{Error, Result};
use num_complex::Complex64;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
/// Largest register handled: 6 qubits.
pub const MAX_DIM: usize = 1 << 6;

/// A normalized density matrix plus the probability mass that survived
/// postselection on the way to it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMat,
    weight: f64,
}

impl DensityMatrix {
    /// Validates `data` against the density-matrix invariants.
    pub fn from_matrix(data: CMat) -> Result<Self> {
        let rho = Self { data, weight: 1.0 };
        rho.validate()?;
        Ok(rho)
    }

    /// Hermitizes and rescales a positive (possibly unnormalized) operator.
    /// Used internally after operations known to preserve positivity.
    pub(crate) fn from_positive(data: CMat, weight: f64) -> Result<Self> {
        let tr = linalg::trace(&data).re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("non-positive trace {tr:.3e}")));
        }
        Ok(Self { data: linalg::hermitize(&data).unscale(tr), weight })
    }

    /// `|ψ⟩⟨ψ|` for a nonzero amplitude vector (normalized here).
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        check_dim(psi.len())?;
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self { data: linalg::outer(&v), weight: 1.0 })
    }

    /// Computational basis projector `|index⟩⟨index|`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut data = CMat::zeros(dim, dim);
        data[(index, index)] = linalg::ONE;
        Ok(Self { data, weight: 1.0 })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { data: linalg::identity(dim).unscale(dim as f64), weight: 1.0 })
    }

    /// Convex combination `Σ p_k ρ_k` (probabilities renormalized).
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut acc = CMat::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: rho.dim() });
            }
            if *p < 0.0 {
                return Err(Error::InvalidState(format!("negative mixture weight {p}")));
            }
            acc += rho.matrix().scale(*p);
        }
        Self::from_positive(acc, 1.0)
    }

    pub fn matrix(&self) -> &CMat {
        &self.data
    }

    pub fn into_matrix(self) -> CMat {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.data)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.data.nrows();
        if !self.data.is_square() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        check_dim(dim)?;
        let herm = linalg::hermiticity_residual(&self.data);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (residual {herm:.3e})")));
        }
        let tr = linalg::trace(&self.data);
        if (tr - linalg::ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = self.eigenvalues()[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        if !(0.0..=1.0 + TRACE_TOL).contains(&self.weight) {
            return Err(Error::InvalidState(format!("weight {} outside [0, 1]", self.weight)));
        }
        Ok(())
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::DimensionOverflow { dim, max: MAX_DIM });
    }
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not a power of two ≥ 2")));
    }
    Ok(())
}
