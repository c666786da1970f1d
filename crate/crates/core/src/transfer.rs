//! Franson-type entanglement transfer from energy-time to polarization.
//!
//! Per photon the circuit is: a phase on the long arm, a half-wave plate in
//! the long arm (polarization bit flip controlled by the arm), and a
//! polarizing beam splitter (arm flip controlled by polarization). Half-wave
//! plates in the odd-parity output ports flip photon B's polarization. With
//! both phases locked to zero the polarization output is `|Φ⁺⟩` for every
//! polarization input, and the input polarization state reappears on the
//! output path modes.

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c, CMat};
use crate::qcore::states::{cnot, phase_gate, projector_1q};
use crate::qcore::{
    apply_channel, apply_unitary, embed, DensityMatrix, Photon, PhotonPairState, QuantumChannel, ET_A, ET_B, POL_A, POL_B, S,
};
use crate::optics::pbs_cnot;
use rand::Rng;
use rand_distr::{Distribution, Normal};

const ALL_QUBITS: [&str; 4] = [POL_A, ET_A, POL_B, ET_B];

pub const DEFAULT_DELTA_T_NS: f64 = 2.6;
pub const DEFAULT_COINCIDENCE_WINDOW_NS: f64 = 1.0;
/// Share of pairs kept by coincidence postselection (side peaks discarded).
pub const FRANSON_POSTSELECTION_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerConfig {
    /// Long-arm phase of photon A's interferometer, radians.
    pub phase_a: f64,
    /// Long-arm phase of photon B's interferometer, radians.
    pub phase_b: f64,
    pub delta_t_ns: f64,
    pub coincidence_window_ns: f64,
    /// Standard deviation of the lock error on each phase, radians.
    pub phase_jitter_sigma: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self {
            phase_a: 0.0,
            phase_b: 0.0,
            delta_t_ns: DEFAULT_DELTA_T_NS,
            coincidence_window_ns: DEFAULT_COINCIDENCE_WINDOW_NS,
            phase_jitter_sigma: 0.0,
        }
    }
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_t_ns > 0.0) {
            return Err(Error::InvalidConfig(format!("delta_t_ns must be positive, got {}", self.delta_t_ns)));
        }
        if !(self.coincidence_window_ns > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "coincidence_window_ns must be positive, got {}",
                self.coincidence_window_ns
            )));
        }
        if self.coincidence_window_ns >= self.delta_t_ns {
            return Err(Error::InvalidConfig(format!(
                "coincidence_window_ns ({}) must be smaller than delta_t_ns ({}) to separate the side peaks",
                self.coincidence_window_ns, self.delta_t_ns
            )));
        }
        if !(self.phase_jitter_sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "phase_jitter_sigma must be non-negative, got {}",
                self.phase_jitter_sigma
            )));
        }
        if !self.phase_a.is_finite() || !self.phase_b.is_finite() {
            return Err(Error::InvalidConfig("interferometer phases must be finite".into()));
        }
        Ok(())
    }

    pub fn sum_phase(&self) -> f64 {
        self.phase_a + self.phase_b
    }
}

#[derive(Debug, Clone)]
pub struct TransferOutcome {
    pub joint_out: PhotonPairState,
    pub pol_out: DensityMatrix,
    pub path_out: DensityMatrix,
    /// Probabilities of the detector combinations `(S,S), (S,L), (L,S), (L,L)`.
    pub port_probs: [f64; 4],
    pub franson_postselection_fraction: f64,
}

/// The transfer circuit for fixed long-arm phases as a 16×16 unitary.
pub fn transfer_unitary(phase_a: f64, phase_b: f64) -> CMat {
    let layout = PhotonPairState::layout();
    let lift = |op: &CMat, targets: &[&str]| embed(op, targets, &layout).expect("pair layout");
    let mut u = linalg::identity(16);
    for (photon, phase) in [(Photon::A, phase_a), (Photon::B, phase_b)] {
        u = lift(&phase_gate(phase), &[photon.et()]) * u;
    }
    for photon in Photon::BOTH {
        // long-arm half-wave plate: flip polarization when the photon took L
        u = lift(&cnot(), &[photon.et(), photon.pol()]) * u;
        let pbs = pbs_cnot(photon);
        u = lift(&pbs.matrix, &pbs.targets) * u;
    }
    lift(&parity_flip(), &[ET_A, ET_B, POL_B]) * u
}

/// Flips the third qubit when the first two have odd parity.
fn parity_flip() -> CMat {
    let mut m = CMat::zeros(8, 8);
    for a in 0..2 {
        for b in 0..2 {
            for p in 0..2 {
                let from = (a << 2) | (b << 1) | p;
                let to = (a << 2) | (b << 1) | (p ^ a ^ b);
                m[(to, from)] = linalg::ONE;
            }
        }
    }
    m
}

fn run(state: &PhotonPairState, phase_a: f64, phase_b: f64, dephasing: f64) -> Result<TransferOutcome> {
    let layout = PhotonPairState::layout();
    let mut rho = state.rho().clone();
    if dephasing < 1.0 {
        let ch = QuantumChannel::phase_damping(dephasing)?;
        for photon in Photon::BOTH {
            rho = apply_channel(&rho, &ch, &[photon.et()], &layout)?;
        }
    }
    let rho = apply_unitary(&rho, &transfer_unitary(phase_a, phase_b), &ALL_QUBITS, &layout)?;
    let joint_out = PhotonPairState::new(rho)?;
    let pol_out = joint_out.polarization();
    let path_out = joint_out.energy_time();
    let mut port_probs = [0.0; 4];
    for (k, p) in port_probs.iter_mut().enumerate() {
        *p = path_out.get(k, k).re;
    }
    Ok(TransferOutcome { joint_out, pol_out, path_out, port_probs, franson_postselection_fraction: FRANSON_POSTSELECTION_FRACTION })
}

/// Transfer with lock jitter folded in as the averaged dephasing `e^{−σ²/2}`
/// per interferometer.
pub fn transfer(state: &PhotonPairState, cfg: &InterferometerConfig) -> Result<TransferOutcome> {
    cfg.validate()?;
    let coherence = (-cfg.phase_jitter_sigma.powi(2) / 2.0).exp();
    run(state, cfg.phase_a, cfg.phase_b, coherence)
}

/// Transfer for one realization of the lock jitter drawn from `rng`.
pub fn transfer_sampled<R: Rng + ?Sized>(
    state: &PhotonPairState,
    cfg: &InterferometerConfig,
    rng: &mut R,
) -> Result<TransferOutcome> {
    cfg.validate()?;
    let (da, db) = if cfg.phase_jitter_sigma > 0.0 {
        let normal = Normal::new(0.0, cfg.phase_jitter_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        (normal.sample(rng), normal.sample(rng))
    } else {
        (0.0, 0.0)
    };
    run(state, cfg.phase_a + da, cfg.phase_b + db, 1.0)
}

/// Blocks both long arms: projects `et_A`, `et_B` onto `|S⟩` and scales the
/// weight by the surviving probability.
pub fn block_long_arms(state: &PhotonPairState) -> Result<PhotonPairState> {
    let short = linalg::kron(&projector_1q(S), &projector_1q(S));
    let ch = QuantumChannel::projection(short)?;
    let rho = apply_channel(state.rho(), &ch, &[ET_A, ET_B], &PhotonPairState::layout())?;
    PhotonPairState::new(rho)
}

/// Projector onto the even-parity outcomes `|D,D⟩, |A,A⟩` of a diagonal-basis
/// polarization measurement.
fn diagonal_even_parity() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let d = [c(s, 0.0), c(s, 0.0)];
    let a = [c(s, 0.0), c(-s, 0.0)];
    let pair = |x: &[num_complex::Complex64; 2]| {
        linalg::outer(&[x[0] * x[0], x[0] * x[1], x[1] * x[0], x[1] * x[1]])
    };
    pair(&d) + pair(&a)
}

/// Franson fringe: for each offset `φ` added to the sum phase, the
/// probability that both photons leave through the same diagonal-basis port.
/// It oscillates as `(1 + V cos φ)/2`.
pub fn sum_phase_scan(state: &PhotonPairState, cfg: &InterferometerConfig, phases: &[f64]) -> Result<Vec<(f64, f64)>> {
    let even = diagonal_even_parity();
    phases
        .iter()
        .map(|&phi| {
            let shifted = InterferometerConfig { phase_a: cfg.phase_a + phi, ..cfg.clone() };
            let out = transfer(state, &shifted)?;
            let p = linalg::trace(&(out.pol_out.matrix() * &even)).re;
            Ok((phi, p))
        })
        .collect()
}

/// `(max − min)/(max + min)` over a scan.
pub fn fringe_visibility(scan: &[(f64, f64)]) -> f64 {
    let max = scan.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let min = scan.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    if max + min <= 0.0 {
        return 0.0;
    }
    (max - min) / (max + min)
}

/// Evenly spaced offsets covering one full period, `[0, 2π)`.
pub fn default_scan_phases(points: usize) -> Vec<f64> {
    (0..points).map(|k| 2.0 * std::f64::consts::PI * k as f64 / points as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{apply_noisy_channel, energy_time_state, make_source_state, NoisyChannelSpec, PolInput, SourceConfig};
    use crate::qcore::linalg::max_abs;
    use crate::qcore::states::{phi_phase_vector, phi_plus, phi_plus_vector};
    use crate::qcore::{concurrence, fidelity_to, permute, purity, random_state, trace_distance, RandomKind};
    use crate::rng::substream;
    use std::f64::consts::PI;

    fn ideal_et() -> DensityMatrix {
        phi_plus()
    }

    fn with_pol(pol: &DensityMatrix, et: &DensityMatrix) -> PhotonPairState {
        PhotonPairState::from_parts(pol, et).unwrap()
    }

    #[test]
    fn transfer_circuit_is_unitary() {
        assert!(linalg::unitarity_residual(&transfer_unitary(0.3, -1.2)) < 1e-12);
    }

    #[test]
    fn mixed_input_purified_to_phi_plus() {
        let src = make_source_state(&SourceConfig { franson_visibility: 1.0, pol_input: PolInput::PureVH, ..Default::default() }).unwrap();
        let noisy = apply_noisy_channel(&src, &NoisyChannelSpec::rotating_half_wave(Photon::A)).unwrap();
        let out = transfer(&noisy, &InterferometerConfig::default()).unwrap();
        assert!((fidelity_to(&out.pol_out, &phi_plus_vector()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn input_polarization_reappears_on_paths() {
        for seed in 0..25 {
            let kind = if seed % 2 == 0 { RandomKind::Pure } else { RandomKind::Mixed };
            let pol = random_state(2, kind, seed).unwrap();
            let out = transfer(&with_pol(&pol, &ideal_et()), &InterferometerConfig::default()).unwrap();
            assert!(trace_distance(&out.path_out, &pol).unwrap() < 1e-10);
            assert!((fidelity_to(&out.pol_out, &phi_plus_vector()).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dephased_transfer_metrics() {
        // closed form: pol_out = V|Φ⁺⟩⟨Φ⁺| + (1−V)/2 (|HH⟩⟨HH| + |VV⟩⟨VV|)
        let v = 0.979;
        let pol = DensityMatrix::maximally_mixed(4).unwrap();
        let out = transfer(&with_pol(&pol, &energy_time_state(v, 0.0).unwrap()), &InterferometerConfig::default()).unwrap();
        let expected = crate::qcore::states::dephased_phi_plus(v);
        assert!(max_abs(&(out.pol_out.matrix() - expected.matrix())) < 1e-12);
        assert!((fidelity_to(&out.pol_out, &phi_plus_vector()).unwrap() - 0.9895).abs() < 1e-12);
        assert!((concurrence(&out.pol_out).unwrap() - 0.979).abs() < 1e-10);
        assert!((purity(&out.pol_out) - (1.0 + v * v) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn window_must_be_shorter_than_imbalance() {
        let cfg = InterferometerConfig { coincidence_window_ns: 3.0, ..Default::default() };
        let state = with_pol(&phi_plus(), &ideal_et());
        assert!(matches!(transfer(&state, &cfg), Err(Error::InvalidConfig(_))));
        let cfg = InterferometerConfig { phase_jitter_sigma: -0.1, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn port_probabilities_always_sum_to_one() {
        for seed in 0..30 {
            let rho = random_state(4, RandomKind::Mixed, seed).unwrap();
            let cfg = InterferometerConfig { phase_a: 0.1 * seed as f64, phase_b: 0.7, ..Default::default() };
            let out = transfer(&PhotonPairState::new(rho).unwrap(), &cfg).unwrap();
            assert!((out.port_probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(out.franson_postselection_fraction, 0.5);
        }
    }

    #[test]
    fn sum_phase_rotates_the_output_bell_state() {
        let pol = DensityMatrix::basis(4, 1).unwrap(); // |H,V⟩
        for k in 0..12 {
            let phi = k as f64 * PI / 6.0;
            let cfg = InterferometerConfig { phase_a: 0.4 * phi, phase_b: 0.6 * phi, ..Default::default() };
            let out = transfer(&with_pol(&pol, &ideal_et()), &cfg).unwrap();
            let expected = DensityMatrix::pure(&phi_phase_vector(phi)).unwrap();
            assert!(max_abs(&(out.pol_out.matrix() - expected.matrix())) < 1e-10);
            let f = fidelity_to(&out.pol_out, &phi_plus_vector()).unwrap();
            assert!((f - (1.0 + phi.cos()) / 2.0).abs() < 1e-10);
        }
        // for arbitrary inputs only the fidelity is phase-covariant
        let pol = random_state(2, RandomKind::Mixed, 77).unwrap();
        let cfg = InterferometerConfig { phase_a: 1.1, ..Default::default() };
        let out = transfer(&with_pol(&pol, &ideal_et()), &cfg).unwrap();
        assert!((fidelity_to(&out.pol_out, &phi_plus_vector()).unwrap() - (1.0 + 1.1f64.cos()) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn output_concurrence_tracks_energy_time_visibility() {
        for (seed, v) in [(1, 0.0), (2, 0.4), (3, 0.979), (4, 1.0)] {
            let pol = random_state(2, RandomKind::Mixed, seed).unwrap();
            let out = transfer(&with_pol(&pol, &energy_time_state(v, 0.0).unwrap()), &InterferometerConfig::default()).unwrap();
            assert!((concurrence(&out.pol_out).unwrap() - v).abs() < 1e-10);
        }
    }

    #[test]
    fn transferring_back_restores_the_joint_state() {
        // exchanging the roles of the polarization and path registers and
        // transferring again undoes the first transfer
        let layout = PhotonPairState::layout();
        let exchange = [ET_A, POL_A, ET_B, POL_B];
        for seed in 0..10 {
            let pol = random_state(2, RandomKind::Mixed, seed).unwrap();
            let et = random_state(2, RandomKind::Mixed, 1000 + seed).unwrap();
            let input = with_pol(&pol, &et);
            let first = transfer(&input, &InterferometerConfig::default()).unwrap();
            let swapped = PhotonPairState::new(permute(first.joint_out.rho(), &layout, &exchange).unwrap()).unwrap();
            let second = transfer(&swapped, &InterferometerConfig::default()).unwrap();
            let back = permute(second.joint_out.rho(), &layout, &exchange).unwrap();
            assert!(max_abs(&(back.matrix() - input.rho().matrix())) < 1e-10);
            assert!(trace_distance(&second.path_out, &pol).unwrap() < 1e-10);
        }
    }

    #[test]
    fn blocking_long_arms() {
        let pol = random_state(2, RandomKind::Mixed, 4).unwrap();
        let blocked = block_long_arms(&with_pol(&pol, &ideal_et())).unwrap();
        assert!((blocked.weight() - 0.5).abs() < 1e-15);
        assert!(max_abs(&(blocked.polarization().matrix() - pol.matrix())) < 1e-12);

        let ss = DensityMatrix::basis(4, 0).unwrap();
        let state = with_pol(&pol, &ss);
        let blocked = block_long_arms(&state).unwrap();
        assert_eq!(blocked.weight(), 1.0);
        assert!(max_abs(&(blocked.rho().matrix() - state.rho().matrix())) < 1e-15);

        let ll = DensityMatrix::basis(4, 3).unwrap();
        assert!(matches!(block_long_arms(&with_pol(&pol, &ll)), Err(Error::EmptyPostselection { .. })));
    }

    #[test]
    fn fringe_visibility_matches_source_visibility() {
        let phases = default_scan_phases(72);
        for v in [0.0, 0.5, 0.979, 1.0] {
            let state = make_source_state(&SourceConfig { franson_visibility: v, ..Default::default() }).unwrap();
            let scan = sum_phase_scan(&state, &InterferometerConfig::default(), &phases).unwrap();
            assert!((fringe_visibility(&scan) - v).abs() < 1e-10, "V = {v}");
            for (phi, p) in &scan {
                assert!((p - (1.0 + v * phi.cos()) / 2.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn averaged_jitter_reduces_visibility() {
        let sigma: f64 = 0.2;
        let cfg = InterferometerConfig { phase_jitter_sigma: sigma, ..Default::default() };
        let state = make_source_state(&SourceConfig { franson_visibility: 1.0, ..Default::default() }).unwrap();
        let scan = sum_phase_scan(&state, &cfg, &default_scan_phases(36)).unwrap();
        assert!((fringe_visibility(&scan) - (-sigma * sigma).exp()).abs() < 1e-10);
    }

    #[test]
    fn sampled_jitter_averages_to_dephasing() {
        let sigma = 0.3;
        let cfg = InterferometerConfig { phase_jitter_sigma: sigma, ..Default::default() };
        let state = make_source_state(&SourceConfig { franson_visibility: 1.0, ..Default::default() }).unwrap();
        let mut rng = substream(5, 0, 0);
        let n = 4000;
        let mut acc = CMat::zeros(4, 4);
        for _ in 0..n {
            acc += transfer_sampled(&state, &cfg, &mut rng).unwrap().pol_out.matrix();
        }
        let avg = acc.unscale(n as f64);
        let expected = transfer(&state, &cfg).unwrap().pol_out;
        assert!(max_abs(&(avg - expected.matrix())) < 0.01);
        let no_jitter = InterferometerConfig::default();
        let a = transfer_sampled(&state, &no_jitter, &mut rng).unwrap();
        assert!(max_abs(&(a.pol_out.matrix() - phi_plus().matrix())) < 1e-12);
    }
}
