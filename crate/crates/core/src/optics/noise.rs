use super::jones::{jones, WaveplateKind, WaveplateSpec};
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::{apply_channel, apply_unitary, Photon, PhotonPairState, QuantumChannel};
use std::f64::consts::PI;

pub const DEFAULT_PLATE_STEPS: usize = 360;

/// One stage of a noisy polarization channel.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseStage {
    /// Fixed birefringence on each arm; plates listed in the order light traverses them.
    Coherent { arm_a: Vec<WaveplateSpec>, arm_b: Vec<WaveplateSpec> },
    /// A plate averaged over one rotation period.
    RotatingPlate { arm: Photon, kind: WaveplateKind, steps: usize },
}

/// Ordered stages acting on the polarization qubits only.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoisyChannelSpec {
    pub stages: Vec<NoiseStage>,
}

impl NoisyChannelSpec {
    pub fn clean() -> Self {
        Self::default()
    }

    /// A single rotating half-wave plate on `arm`.
    pub fn rotating_half_wave(arm: Photon) -> Self {
        Self { stages: vec![NoiseStage::RotatingPlate { arm, kind: WaveplateKind::Half, steps: DEFAULT_PLATE_STEPS }] }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, stage) in self.stages.iter().enumerate() {
            if let NoiseStage::RotatingPlate { steps, .. } = stage {
                check_steps(*steps).map_err(|e| Error::InvalidConfig(format!("channel stage {i}: {e}")))?;
            }
        }
        Ok(())
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 4 || !steps.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("rotating plate needs an even step count ≥ 4, got {steps}")));
    }
    Ok(())
}

/// Uniform average of a plate over `steps` orientations `kπ/steps`.
pub fn rotating_plate_channel(kind: WaveplateKind, steps: usize) -> Result<QuantumChannel> {
    check_steps(steps)?;
    let norm = (steps as f64).sqrt();
    let kraus = (0..steps)
        .map(|k| jones(&WaveplateSpec::new(kind, k as f64 * PI / steps as f64)).unscale(norm))
        .collect();
    QuantumChannel::new(kraus, true)
}

fn plate_stack(plates: &[WaveplateSpec]) -> CMat {
    plates.iter().fold(linalg::identity(2), |acc, p| jones(p) * acc)
}

/// Applies the stages in order. Energy-time qubits are untouched.
pub fn apply_noisy_channel(state: &PhotonPairState, spec: &NoisyChannelSpec) -> Result<PhotonPairState> {
    spec.validate()?;
    let layout = PhotonPairState::layout();
    let mut rho = state.rho().clone();
    for stage in &spec.stages {
        rho = match stage {
            NoiseStage::Coherent { arm_a, arm_b } => {
                let u = linalg::kron(&plate_stack(arm_a), &plate_stack(arm_b));
                apply_unitary(&rho, &u, &[Photon::A.pol(), Photon::B.pol()], &layout)?
            }
            NoiseStage::RotatingPlate { arm, kind, steps } => {
                let ch = rotating_plate_channel(*kind, *steps)?;
                apply_channel(&rho, &ch, &[arm.pol()], &layout)?
            }
        };
    }
    PhotonPairState::new(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{make_source_state, PolInput, SourceConfig};
    use crate::qcore::linalg::{c, max_abs};
    use crate::qcore::states::haar_unitary;
    use crate::qcore::{concurrence, random_state, DensityMatrix, RandomKind, SubsystemLayout};
    use crate::rng::substream;

    fn one_qubit() -> SubsystemLayout {
        SubsystemLayout::new(["q"]).unwrap()
    }

    fn ideal_source(pol_input: PolInput) -> PhotonPairState {
        make_source_state(&SourceConfig { franson_visibility: 1.0, pol_input, ..SourceConfig::default() }).unwrap()
    }

    #[test]
    fn half_wave_rotation_depolarizes_h() {
        let ch = rotating_plate_channel(WaveplateKind::Half, 360).unwrap();
        let h = DensityMatrix::basis(2, 0).unwrap();
        let out = apply_channel(&h, &ch, &["q"], &one_qubit()).unwrap();
        assert!(max_abs(&(out.matrix() - linalg::identity(2).unscale(2.0))) < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let out = apply_channel(&mixed, &ch, &["q"], &one_qubit()).unwrap();
        assert!(max_abs(&(out.matrix() - mixed.matrix())) < 1e-12);
    }

    #[test]
    fn quarter_wave_rotation_partially_depolarizes_h() {
        let steps = 360;
        // grid average of |⟨V|QWP(θ)|H⟩|² = sin²(2θ)/2
        let p_v: f64 = (0..steps)
            .map(|k| (2.0 * k as f64 * PI / steps as f64).sin().powi(2) / 2.0)
            .sum::<f64>()
            / steps as f64;
        assert!((p_v - 0.25).abs() < 1e-12);

        let ch = rotating_plate_channel(WaveplateKind::Quarter, steps).unwrap();
        let h = DensityMatrix::basis(2, 0).unwrap();
        let out = apply_channel(&h, &ch, &["q"], &one_qubit()).unwrap();
        assert!((out.get(0, 0).re - (1.0 - p_v)).abs() < 1e-12);
        assert!((out.get(1, 1).re - p_v).abs() < 1e-12);
        assert!(out.get(0, 1).norm() < 1e-12);
    }

    #[test]
    fn rotating_channels_are_unital_and_complete() {
        for kind in [WaveplateKind::Half, WaveplateKind::Quarter] {
            for steps in [4, 8, 90, 360] {
                let ch = rotating_plate_channel(kind, steps).unwrap();
                let gram = ch.kraus().iter().fold(CMat::zeros(2, 2), |acc, k| acc + k.adjoint() * k);
                assert!(max_abs(&(gram - linalg::identity(2))) < 1e-12);
                let mixed = DensityMatrix::maximally_mixed(2).unwrap();
                let out = apply_channel(&mixed, &ch, &["q"], &one_qubit()).unwrap();
                assert!(max_abs(&(out.matrix() - mixed.matrix())) < 1e-12);
            }
        }
    }

    #[test]
    fn half_wave_rotation_depolarizes_any_linear_input() {
        // a half-wave plate maps circular to the opposite circular polarization at
        // every angle, so the exact-I/2 property holds for linearly polarized inputs
        for steps in [4, 6, 8, 90, 360] {
            let ch = rotating_plate_channel(WaveplateKind::Half, steps).unwrap();
            for k in 0..25 {
                let theta = 0.37 * k as f64;
                let psi = [c(theta.cos(), 0.0), c(theta.sin(), 0.0)];
                let rho = DensityMatrix::pure(&psi).unwrap();
                let out = apply_channel(&rho, &ch, &["q"], &one_qubit()).unwrap();
                assert!(max_abs(&(out.matrix() - linalg::identity(2).unscale(2.0))) < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_step_counts_rejected() {
        for steps in [0, 2, 5, 91] {
            assert!(rotating_plate_channel(WaveplateKind::Half, steps).is_err());
        }
        let spec = NoisyChannelSpec {
            stages: vec![NoiseStage::RotatingPlate { arm: Photon::A, kind: WaveplateKind::Half, steps: 3 }],
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn empty_channel_is_identity() {
        let src = ideal_source(PolInput::BellP);
        let out = apply_noisy_channel(&src, &NoisyChannelSpec::clean()).unwrap();
        assert!(max_abs(&(out.rho().matrix() - src.rho().matrix())) < 1e-15);
    }

    #[test]
    fn mixed_inputs_from_rotating_plate_on_a() {
        // |V,H⟩ → (|HH⟩⟨HH| + |VH⟩⟨VH|)/2, |H,V⟩ → (|VV⟩⟨VV| + |HV⟩⟨HV|)/2
        let cases = [(PolInput::PureVH, [0usize, 2]), (PolInput::PureHV, [3, 1])];
        for (input, diag) in cases {
            let out = apply_noisy_channel(&ideal_source(input), &NoisyChannelSpec::rotating_half_wave(Photon::A)).unwrap();
            let pol = out.polarization();
            let mut expected = CMat::zeros(4, 4);
            for d in diag {
                expected[(d, d)] = c(0.5, 0.0);
            }
            assert!(max_abs(&(pol.matrix() - expected)) < 1e-12);
            assert!(concurrence(&pol).unwrap() < 1e-10);
        }
    }

    #[test]
    fn coherent_stage_applies_plates_in_order() {
        // H → HWP(22.5°) → D → QWP(45°) keeps D up to phase; reversed order gives a different state
        let spec = |plates: Vec<WaveplateSpec>| NoisyChannelSpec {
            stages: vec![NoiseStage::Coherent { arm_a: plates, arm_b: vec![] }],
        };
        let src = ideal_source(PolInput::PureHV);
        let plates = vec![WaveplateSpec::half(22.5f64.to_radians()), WaveplateSpec::quarter(45f64.to_radians())];
        let mut reversed = plates.clone();
        reversed.reverse();
        let a = apply_noisy_channel(&src, &spec(plates)).unwrap().polarization();
        let b = apply_noisy_channel(&src, &spec(reversed)).unwrap().polarization();
        // pol_A = D: ⟨pol_A=H⟩ population 1/2 and real coherence 1/2 between H and V on A
        assert!((a.get(1, 1).re - 0.5).abs() < 1e-12);
        assert!((a.get(1, 3).re - 0.5).abs() < 1e-12);
        assert!(max_abs(&(a.matrix() - b.matrix())) > 0.1);
    }

    #[test]
    fn noise_commutes_with_energy_time_unitaries() {
        let layout = PhotonPairState::layout();
        let spec = NoisyChannelSpec {
            stages: vec![
                NoiseStage::Coherent { arm_a: vec![WaveplateSpec::quarter(0.4)], arm_b: vec![WaveplateSpec::half(1.1)] },
                NoiseStage::RotatingPlate { arm: Photon::B, kind: WaveplateKind::Quarter, steps: 8 },
                NoiseStage::RotatingPlate { arm: Photon::A, kind: WaveplateKind::Half, steps: 36 },
            ],
        };
        for seed in 0..20 {
            let mut rng = substream(seed, 99, 0);
            let u = haar_unitary(4, &mut rng);
            let rho = PhotonPairState::new(random_state(4, RandomKind::Mixed, seed).unwrap()).unwrap();
            let et = [Photon::A.et(), Photon::B.et()];
            let a = apply_noisy_channel(&rho, &spec).unwrap();
            let a = apply_unitary(a.rho(), &u, &et, &layout).unwrap();
            let b = PhotonPairState::new(apply_unitary(rho.rho(), &u, &et, &layout).unwrap()).unwrap();
            let b = apply_noisy_channel(&b, &spec).unwrap();
            assert!(max_abs(&(a.matrix() - b.rho().matrix())) < 1e-12);
        }
    }
}
