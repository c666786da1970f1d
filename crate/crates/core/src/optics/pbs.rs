use crate::qcore::states::cnot;
use crate::qcore::linalg::CMat;
use crate::qcore::Photon;

/// A gate together with the register qubits it acts on.
#[derive(Debug, Clone)]
pub struct LocalGate {
    pub matrix: CMat,
    pub targets: Vec<&'static str>,
}

/// Polarizing beam splitter as a CNOT: the polarization of `photon` controls
/// its path qubit, so a V photon swaps output path modes.
pub fn pbs_cnot(photon: Photon) -> LocalGate {
    LocalGate { matrix: cnot(), targets: vec![photon.pol(), photon.et()] }
}
