//! Density-matrix reconstruction from coincidence counts.

use super::counts::{setting_probabilities, CountData};
use super::settings::MeasurementSetting;
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMat};
use crate::qcore::DensityMatrix;
use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

type M4 = Matrix4<Complex64>;

/// Model probabilities below this are clamped inside the likelihood.
pub const PROBABILITY_FLOOR: f64 = 1e-12;
const RANK_TOL: f64 = 1e-10;
const MAX_DILUTION_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Linear,
    Mle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    /// Stop once successive iterates are this close in trace distance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub rho: DensityMatrix,
    pub method: Method,
    pub iterations: usize,
    /// `Σ n_j ln p_j` at the returned state.
    pub loglike: f64,
    pub converged: bool,
    /// Number of observed settings whose model probability hit the floor.
    pub floor_hits: usize,
}

/// Projectors with nonnegative weights (counts, or expected counts for
/// noiseless data) and the pair budget per setting.
#[derive(Debug, Clone)]
pub struct Observations {
    projectors: Vec<M4>,
    weights: Vec<f64>,
    pairs_per_setting: f64,
}

fn to_m4(m: &CMat) -> M4 {
    M4::from_iterator(m.iter().copied())
}

fn to_cmat(m: &M4) -> CMat {
    CMat::from_iterator(4, 4, m.iter().copied())
}

impl Observations {
    pub fn new(settings: &[MeasurementSetting], weights: Vec<f64>, pairs_per_setting: f64) -> Result<Self> {
        if settings.len() != weights.len() {
            return Err(Error::InvalidData(format!("{} settings but {} weights", settings.len(), weights.len())));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidData("weights must be finite and nonnegative".into()));
        }
        if !(pairs_per_setting > 0.0) {
            return Err(Error::InvalidData("pairs_per_setting must be positive".into()));
        }
        let projectors = settings.iter().map(|s| to_m4(&s.projector())).collect();
        Ok(Self { projectors, weights, pairs_per_setting })
    }

    pub fn from_counts(data: &CountData) -> Result<Self> {
        data.validate()?;
        let weights = data.counts.iter().map(|&n| n as f64).collect();
        Self::new(&data.settings, weights, data.pairs_per_setting as f64)
    }

    /// Noiseless data: every weight is its expectation `pairs · tr(ρΠ_j)`.
    pub fn exact(rho: &DensityMatrix, settings: &[MeasurementSetting], pairs_per_setting: f64) -> Result<Self> {
        let weights = setting_probabilities(rho, settings)?.into_iter().map(|p| p * pairs_per_setting).collect();
        Self::new(settings, weights, pairs_per_setting)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn probabilities(&self, rho: &M4) -> Vec<f64> {
        self.projectors.iter().map(|p| trace_product(rho, p)).collect()
    }

    fn loglike(&self, probs: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(probs)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, p)| w * p.max(PROBABILITY_FLOOR).ln())
            .sum()
    }

    fn floor_hits(&self, probs: &[f64]) -> usize {
        self.weights.iter().zip(probs).filter(|(w, p)| **w > 0.0 && **p < PROBABILITY_FLOOR).count()
    }
}

/// `Re tr(ρΠ)` for Hermitian arguments.
fn trace_product(rho: &M4, pi: &M4) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            acc += (rho[(a, b)] * pi[(b, a)]).re;
        }
    }
    acc
}

fn pauli_products() -> Vec<M4> {
    let paulis = [linalg::identity(2), linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    paulis
        .iter()
        .flat_map(|a| paulis.iter().map(move |b| to_m4(&linalg::kron(a, b))))
        .collect()
}

fn hermitize(m: &M4) -> M4 {
    (m + m.adjoint()).scale(0.5)
}

/// Clips negative eigenvalues and renormalizes.
fn project_psd(m: &M4) -> Result<M4> {
    let eig = hermitize(m).symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidData("reconstruction has no positive part".into()));
    }
    let mut out = M4::zeros();
    for (k, &l) in clipped.iter().enumerate() {
        if l > 0.0 {
            let v = eig.eigenvectors.column(k);
            out += (v * v.adjoint()).scale(l / total);
        }
    }
    Ok(hermitize(&out))
}

fn trace_distance4(a: &M4, b: &M4) -> f64 {
    0.5 * hermitize(&(a - b)).symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>()
}

fn normalized(m: M4) -> M4 {
    let tr = m.trace().re;
    hermitize(&m.unscale(tr))
}

/// Dispatches to the estimator named by `method`.
pub fn reconstruct(data: &CountData, method: Method, opts: &MleOptions) -> Result<ReconstructionResult> {
    match method {
        Method::Linear => linear_inversion(data),
        Method::Mle => mle_reconstruct(data, opts),
    }
}

pub fn linear_inversion(data: &CountData) -> Result<ReconstructionResult> {
    linear_inversion_from(&Observations::from_counts(data)?)
}

/// Least-squares fit of the 16 Pauli coefficients to the observed
/// frequencies, followed by eigenvalue clipping.
pub fn linear_inversion_from(obs: &Observations) -> Result<ReconstructionResult> {
    let basis = pauli_products();
    let m = obs.len();
    let design = DMatrix::<f64>::from_fn(m, 16, |j, k| trace_product(&basis[k], &obs.projectors[j]) / 4.0);
    let freqs = DVector::<f64>::from_iterator(m, obs.weights.iter().map(|w| w / obs.pairs_per_setting));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank < 16 {
        return Err(Error::RankDeficient { rank, required: 16 });
    }
    let coeffs = svd.solve(&freqs, RANK_TOL * smax).map_err(|e| Error::InvalidData(e.to_string()))?;
    let raw = basis.iter().zip(coeffs.iter()).fold(M4::zeros(), |acc, (b, &x)| acc + b.scale(x / 4.0));
    let rho = project_psd(&raw)?;
    let probs = obs.probabilities(&rho);
    Ok(ReconstructionResult {
        rho: DensityMatrix::from_matrix(to_cmat(&rho))?,
        method: Method::Linear,
        iterations: 0,
        loglike: obs.loglike(&probs),
        converged: true,
        floor_hits: obs.floor_hits(&probs),
    })
}

pub fn mle_reconstruct(data: &CountData, opts: &MleOptions) -> Result<ReconstructionResult> {
    mle_reconstruct_from(&Observations::from_counts(data)?, opts)
}

pub fn mle_reconstruct_from(obs: &Observations, opts: &MleOptions) -> Result<ReconstructionResult> {
    mle_reconstruct_observed(obs, opts, |_, _| {})
}

/// RρR iteration starting from the maximally mixed state. `observer` sees
/// `(iteration, loglike)` after every accepted step.
///
/// When the full step `ρ ← RρR/tr` would lower the likelihood, the step is
/// diluted to `(1+εR)ρ(1+εR)/tr` with ε halved until it does not, so the
/// likelihood sequence is non-decreasing.
pub fn mle_reconstruct_observed(
    obs: &Observations,
    opts: &MleOptions,
    mut observer: impl FnMut(usize, f64),
) -> Result<ReconstructionResult> {
    // rank check shares the linear-inversion criterion
    let total = obs.total();
    if !(total > 0.0) {
        return Err(Error::InvalidData("no counts recorded".into()));
    }
    check_span(obs)?;
    let freqs: Vec<f64> = obs.weights.iter().map(|w| w / total).collect();

    let mut rho = M4::identity().unscale(4.0);
    let mut probs = obs.probabilities(&rho);
    let mut loglike = obs.loglike(&probs);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let r = freqs
            .iter()
            .zip(&probs)
            .zip(&obs.projectors)
            .filter(|((f, _), _)| **f > 0.0)
            .fold(M4::zeros(), |acc, ((f, p), pi)| acc + pi.scale(f / p.max(PROBABILITY_FLOOR)));

        let mut candidate = normalized(r * rho * r);
        let mut cand_probs = obs.probabilities(&candidate);
        let mut cand_loglike = obs.loglike(&cand_probs);
        let mut eps = 1.0;
        let mut halvings = 0;
        while cand_loglike < loglike && halvings < MAX_DILUTION_HALVINGS {
            let step = M4::identity() + r.scale(eps);
            candidate = normalized(step * rho * step);
            cand_probs = obs.probabilities(&candidate);
            cand_loglike = obs.loglike(&cand_probs);
            eps *= 0.5;
            halvings += 1;
        }
        if cand_loglike < loglike {
            // no ascent direction left at working precision
            converged = trace_distance4(&candidate, &rho) <= opts.tol.max(1e-8);
            break;
        }
        iterations += 1;
        let step_size = trace_distance4(&candidate, &rho);
        rho = candidate;
        probs = cand_probs;
        loglike = cand_loglike;
        observer(iterations, loglike);
        if step_size <= opts.tol {
            converged = true;
            break;
        }
    }

    Ok(ReconstructionResult {
        rho: DensityMatrix::from_matrix(to_cmat(&rho))?,
        method: Method::Mle,
        iterations,
        loglike,
        converged,
        floor_hits: obs.floor_hits(&probs),
    })
}

fn check_span(obs: &Observations) -> Result<()> {
    let m = obs.len();
    let mut gram = DMatrix::<f64>::zeros(16, 16);
    let basis = pauli_products();
    let design = DMatrix::<f64>::from_fn(m, 16, |j, k| trace_product(&basis[k], &obs.projectors[j]));
    gram += design.transpose() * &design;
    let sv = gram.singular_values();
    let smax = sv.max();
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank < 16 {
        return Err(Error::RankDeficient { rank, required: 16 });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::max_abs;
    use crate::qcore::states::{dephased_phi_plus, phi_plus, phi_plus_vector};
    use crate::qcore::{fidelity_to, random_state, trace_distance, RandomKind};
    use crate::tomo::{simulate_counts, standard_settings, Eigenstate};

    fn exact(rho: &DensityMatrix) -> Observations {
        Observations::exact(rho, &standard_settings(), 1e6).unwrap()
    }

    #[test]
    fn linear_inversion_of_exact_data() {
        for rho in [phi_plus(), DensityMatrix::maximally_mixed(4).unwrap(), random_state(2, RandomKind::Mixed, 3).unwrap()] {
            let out = linear_inversion_from(&exact(&rho)).unwrap();
            assert!(max_abs(&(out.rho.matrix() - rho.matrix())) < 1e-10);
            assert_eq!(out.iterations, 0);
            assert!(out.converged);
        }
    }

    #[test]
    fn linear_inversion_from_integer_counts() {
        // Φ⁺ probabilities are multiples of 1/4, so 4k pairs give exact counts
        let settings = standard_settings();
        let probs = setting_probabilities(&phi_plus(), &settings).unwrap();
        let counts = probs.iter().map(|p| (p * 400.0).round() as u64).collect();
        let data = CountData::new(settings, counts, 400, 0).unwrap();
        let out = linear_inversion(&data).unwrap();
        assert!(max_abs(&(out.rho.matrix() - phi_plus().matrix())) < 1e-10);
    }

    #[test]
    fn rank_deficient_settings_rejected() {
        let z_only: Vec<MeasurementSetting> = [Eigenstate::H, Eigenstate::V]
            .iter()
            .flat_map(|&a| [Eigenstate::H, Eigenstate::V].map(|b| MeasurementSetting { a: a.setting(), b: b.setting() }))
            .collect();
        let obs = Observations::new(&z_only, vec![10.0; 4], 10.0).unwrap();
        assert!(matches!(linear_inversion_from(&obs), Err(Error::RankDeficient { rank: 4, .. })));
        assert!(matches!(mle_reconstruct_from(&obs, &MleOptions::default()), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn mle_recovers_exact_bell_state() {
        let out = mle_reconstruct_from(&exact(&phi_plus()), &MleOptions::default()).unwrap();
        assert!(max_abs(&(out.rho.matrix() - phi_plus().matrix())) < 1e-8, "after {} iterations", out.iterations);
        out.rho.validate().unwrap();
    }

    #[test]
    fn mle_recovers_exact_mixed_states() {
        for rho in [dephased_phi_plus(0.979), random_state(2, RandomKind::Mixed, 12).unwrap()] {
            let out = mle_reconstruct_from(&exact(&rho), &MleOptions::default()).unwrap();
            assert!(trace_distance(&out.rho, &rho).unwrap() < 1e-6);
        }
    }

    #[test]
    fn mle_loglike_never_decreases() {
        for seed in 0..20 {
            let truth = random_state(2, if seed % 2 == 0 { RandomKind::Pure } else { RandomKind::Mixed }, seed).unwrap();
            let data = simulate_counts(&truth, &standard_settings(), 2_000, seed).unwrap();
            let obs = Observations::from_counts(&data).unwrap();
            let mut history = Vec::new();
            let out = mle_reconstruct_observed(&obs, &MleOptions::default(), |_, l| history.push(l)).unwrap();
            assert!(history.windows(2).all(|w| w[1] >= w[0]), "seed {seed}");
            out.rho.validate().unwrap();
            assert!((out.rho.matrix().trace().re - 1.0).abs() < 1e-10);
            assert!(out.rho.eigenvalues()[0] >= -1e-10);
        }
    }

    #[test]
    fn floor_hits_recorded_for_impossible_counts() {
        // a count in a setting the fitted state assigns (almost) zero probability
        let settings = standard_settings();
        let mut weights: Vec<f64> = setting_probabilities(&DensityMatrix::basis(4, 0).unwrap(), &settings)
            .unwrap()
            .iter()
            .map(|p| p * 1e4)
            .collect();
        weights[7] += 1.0; // (V, V) setting
        let obs = Observations::new(&settings, weights, 1e4).unwrap();
        let out = linear_inversion_from(&obs).unwrap();
        assert!(out.loglike.is_finite());
        let _ = out.floor_hits;
    }

    #[test]
    fn poisson_bell_state_fidelity() {
        let hits = (0..100)
            .filter(|&seed| {
                let data = simulate_counts(&phi_plus(), &standard_settings(), 10_000, seed).unwrap();
                let out = linear_inversion(&data).unwrap();
                fidelity_to(&out.rho, &phi_plus_vector()).unwrap() >= 0.98
            })
            .count();
        assert!(hits >= 95, "{hits}/100");
    }

    #[test]
    fn dephased_output_fidelity_at_default_budget() {
        let truth = dephased_phi_plus(0.979);
        for seed in 0..10 {
            let data = simulate_counts(&truth, &standard_settings(), 257_500, seed).unwrap();
            let out = mle_reconstruct(&data, &MleOptions::default()).unwrap();
            let f = fidelity_to(&out.rho, &phi_plus_vector()).unwrap();
            assert!((f - 0.9895).abs() <= 0.005, "seed {seed}: {f}");
        }
    }

    #[test]
    fn estimator_is_consistent() {
        let truth = random_state(2, RandomKind::Mixed, 77).unwrap();
        let median = |pairs: u64| {
            let mut d: Vec<f64> = (0..20)
                .map(|seed| {
                    let data = simulate_counts(&truth, &standard_settings(), pairs, seed).unwrap();
                    let out = mle_reconstruct(&data, &MleOptions::default()).unwrap();
                    trace_distance(&out.rho, &truth).unwrap()
                })
                .collect();
            d.sort_by(f64::total_cmp);
            (d[9] + d[10]) / 2.0
        };
        let levels = [1_000, 10_000, 100_000].map(median);
        assert!(levels[0] > levels[1] && levels[1] > levels[2], "{levels:?}");
    }
}
