use crate::error::{Error, Result};
use crate::qcore::linalg::{c, CMat};
use crate::qcore::{DensityMatrix, PhotonPairState};
use num_complex::Complex64;

/// Franson interference contrast of the modeled source.
pub const MEASURED_FRANSON_VISIBILITY: f64 = 0.979;

/// Polarization part of the source output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolInput {
    /// `√p|H,H⟩ + √(1−p)|V,V⟩` with `p = balance_p`.
    BellP,
    /// `|H,V⟩`.
    PureHV,
    /// `|V,H⟩`.
    PureVH,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    pub balance_p: f64,
    pub franson_visibility: f64,
    /// Locked sum phase of the energy-time Bell state, radians.
    pub sum_phase: f64,
    pub pol_input: PolInput,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            balance_p: 0.5,
            franson_visibility: MEASURED_FRANSON_VISIBILITY,
            sum_phase: 0.0,
            pol_input: PolInput::BellP,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.balance_p) {
            return Err(Error::InvalidConfig(format!("balance_p {} outside [0, 0.5]", self.balance_p)));
        }
        if !(0.0..=1.0).contains(&self.franson_visibility) {
            return Err(Error::InvalidConfig(format!(
                "franson_visibility {} outside [0, 1]",
                self.franson_visibility
            )));
        }
        if !self.sum_phase.is_finite() {
            return Err(Error::InvalidConfig("sum_phase is not finite".into()));
        }
        Ok(())
    }
}

/// Two-qubit polarization state on `(pol_A, pol_B)`.
pub fn polarization_state(input: PolInput, balance_p: f64) -> Result<DensityMatrix> {
    let z = Complex64::new(0.0, 0.0);
    let psi = match input {
        PolInput::BellP => [c(balance_p.sqrt(), 0.0), z, z, c((1.0 - balance_p).sqrt(), 0.0)],
        PolInput::PureHV => [z, c(1.0, 0.0), z, z],
        PolInput::PureVH => [z, z, c(1.0, 0.0), z],
    };
    DensityMatrix::pure(&psi)
}

/// `V·|Φ⁺_φ⟩⟨Φ⁺_φ| + (1−V)/2·(|SS⟩⟨SS| + |LL⟩⟨LL|)` with `|Φ⁺_φ⟩ = (|SS⟩ + e^{iφ}|LL⟩)/√2`.
pub fn energy_time_state(visibility: f64, sum_phase: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidConfig(format!("visibility {visibility} outside [0, 1]")));
    }
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = c(0.5, 0.0);
    m[(3, 3)] = c(0.5, 0.0);
    let coherence = Complex64::from_polar(visibility / 2.0, sum_phase);
    m[(3, 0)] = coherence;
    m[(0, 3)] = coherence.conj();
    DensityMatrix::from_matrix(m)
}

/// Hyperentangled pair: the selected polarization state times the
/// energy-time state. Weight 1.
pub fn make_source_state(cfg: &SourceConfig) -> Result<PhotonPairState> {
    cfg.validate()?;
    let pol = polarization_state(cfg.pol_input, cfg.balance_p)?;
    let et = energy_time_state(cfg.franson_visibility, cfg.sum_phase)?;
    PhotonPairState::from_parts(&pol, &et)
}
