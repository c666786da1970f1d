use super::{partial_trace, DensityMatrix, SubsystemLayout, ET_A, ET_B, POL_A, POL_B};
use crate::error::{Error, Result};

/// One of the two photons of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Photon {
    A,
    B,
}

impl Photon {
    pub const BOTH: [Photon; 2] = [Photon::A, Photon::B];

    pub fn pol(self) -> &'static str {
        match self {
            Photon::A => POL_A,
            Photon::B => POL_B,
        }
    }

    pub fn et(self) -> &'static str {
        match self {
            Photon::A => ET_A,
            Photon::B => ET_B,
        }
    }
}

/// Joint state of a photon pair over `(pol_A, et_A, pol_B, et_B)`.
///
/// After the transfer stage the `et` qubits describe the output path modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonPairState {
    rho: DensityMatrix,
}

impl PhotonPairState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        if rho.dim() != 16 {
            return Err(Error::DimensionMismatch { expected: 16, got: rho.dim() });
        }
        Ok(Self { rho })
    }

    /// Builds the pair state from a polarization state on `(pol_A, pol_B)`
    /// and an energy-time state on `(et_A, et_B)`.
    pub fn from_parts(pol: &DensityMatrix, et: &DensityMatrix) -> Result<Self> {
        for part in [pol, et] {
            if part.dim() != 4 {
                return Err(Error::DimensionMismatch { expected: 4, got: part.dim() });
            }
        }
        let grouped = super::tensor(pol, et)?;
        let grouped_layout = SubsystemLayout::new([POL_A, POL_B, ET_A, ET_B])?;
        let rho = super::permute(&grouped, &grouped_layout, &[POL_A, ET_A, POL_B, ET_B])?;
        Ok(Self { rho })
    }

    pub fn layout() -> SubsystemLayout {
        SubsystemLayout::pair()
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> DensityMatrix {
        self.rho
    }

    pub fn weight(&self) -> f64 {
        self.rho.weight()
    }

    /// Reduced state on `(pol_A, pol_B)`.
    pub fn polarization(&self) -> DensityMatrix {
        partial_trace(&self.rho, &Self::layout(), &[POL_A, POL_B]).expect("pair layout")
    }

    /// Reduced state on `(et_A, et_B)`.
    pub fn energy_time(&self) -> DensityMatrix {
        partial_trace(&self.rho, &Self::layout(), &[ET_A, ET_B]).expect("pair layout")
    }
}
