//! Parametric-bootstrap error bars: every count is redrawn as a Poisson
//! variate around its observed value and the reconstruction is repeated.

use super::chsh::{chsh_value, ChshAngles};
use super::counts::CountData;
use super::recon::{reconstruct, Method, MleOptions};
use crate::error::{Error, Result};
use crate::qcore::states::phi_plus_vector;
use crate::qcore::{concurrence, fidelity_to, purity, DensityMatrix};
use crate::rng::{stage, substream};
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

pub const DEFAULT_MC_SAMPLES: usize = 100;
pub const MIN_MC_SAMPLES: usize = 10;
/// Largest tolerated share of failed resample reconstructions.
const MAX_DROP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// One standard deviation.
    pub sigma: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, sigma: 0.0 }
    }
}

/// Figures of merit of a single two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    /// Overlap with Φ⁺.
    pub fidelity: f64,
    pub concurrence: f64,
    pub purity: f64,
    pub s_value: f64,
}

pub fn metrics_of(rho: &DensityMatrix, angles: &ChshAngles) -> Result<PointMetrics> {
    Ok(PointMetrics {
        fidelity: fidelity_to(rho, &phi_plus_vector())?,
        concurrence: concurrence(rho)?,
        purity: purity(rho),
        s_value: chsh_value(rho, angles)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub fidelity: Estimate,
    pub concurrence: Estimate,
    pub purity: Estimate,
    pub s_value: Estimate,
    pub n_samples: usize,
    pub n_dropped: usize,
}

impl MetricsReport {
    /// Zero-sigma report for a state known exactly.
    pub fn exact(m: &PointMetrics) -> Self {
        Self {
            fidelity: Estimate::exact(m.fidelity),
            concurrence: Estimate::exact(m.concurrence),
            purity: Estimate::exact(m.purity),
            s_value: Estimate::exact(m.s_value),
            n_samples: 0,
            n_dropped: 0,
        }
    }

    pub fn values(&self) -> PointMetrics {
        PointMetrics {
            fidelity: self.fidelity.value,
            concurrence: self.concurrence.value,
            purity: self.purity.value,
            s_value: self.s_value.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resampling {
    /// Each count redrawn from a Poisson law with the observed count as mean.
    Poisson,
    /// Every sample reuses the observed counts (zero-variance path).
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    pub n_samples: usize,
    pub seed: u64,
    pub method: Method,
    pub resampling: Resampling,
    pub angles: ChshAngles,
    pub mle: MleOptions,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_MC_SAMPLES,
            seed: 0,
            method: Method::Mle,
            resampling: Resampling::Poisson,
            angles: ChshAngles::default(),
            mle: MleOptions::default(),
        }
    }
}

fn resample(data: &CountData, seed: u64, index: usize) -> CountData {
    let mut rng = substream(seed, stage::BOOTSTRAP, index as u64);
    let counts = data
        .counts
        .iter()
        .map(|&n| if n == 0 { 0 } else { Poisson::new(n as f64).map(|d| d.sample(&mut rng) as u64).unwrap_or(n) })
        .collect();
    CountData { counts, ..data.clone() }
}

fn sample_sigma(xs: &[f64]) -> f64 {
    // shifting by the first sample makes identical inputs give exactly 0
    let shift = xs[0];
    let xs: Vec<f64> = xs.iter().map(|x| x - shift).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Point values from reconstructing `data` itself, sigmas from
/// `opts.n_samples` resampled reconstructions.
pub fn monte_carlo_metrics(data: &CountData, opts: &BootstrapOptions) -> Result<MetricsReport> {
    if opts.n_samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "n_samples must be at least {MIN_MC_SAMPLES}, got {}",
            opts.n_samples
        )));
    }
    let point = metrics_of(&reconstruct(data, opts.method, &opts.mle)?.rho, &opts.angles)?;

    let samples: Vec<Option<PointMetrics>> = (0..opts.n_samples)
        .into_par_iter()
        .map(|i| {
            let trial = match opts.resampling {
                Resampling::Poisson => resample(data, opts.seed, i),
                Resampling::Fixed => data.clone(),
            };
            reconstruct(&trial, opts.method, &opts.mle)
                .and_then(|r| metrics_of(&r.rho, &opts.angles))
                .ok()
        })
        .collect();
    let kept: Vec<PointMetrics> = samples.iter().flatten().copied().collect();
    let dropped = opts.n_samples - kept.len();
    if dropped as f64 > MAX_DROP_FRACTION * opts.n_samples as f64 || kept.len() < 2 {
        return Err(Error::BootstrapFailure { failed: dropped, total: opts.n_samples });
    }

    let sigma = |f: fn(&PointMetrics) -> f64| sample_sigma(&kept.iter().map(f).collect::<Vec<_>>());
    Ok(MetricsReport {
        fidelity: Estimate { value: point.fidelity, sigma: sigma(|m| m.fidelity) },
        concurrence: Estimate { value: point.concurrence, sigma: sigma(|m| m.concurrence) },
        purity: Estimate { value: point.purity, sigma: sigma(|m| m.purity) },
        s_value: Estimate { value: point.s_value, sigma: sigma(|m| m.s_value) },
        n_samples: kept.len(),
        n_dropped: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::states::{dephased_phi_plus, phi_plus};
    use crate::tomo::{setting_probabilities, simulate_counts, standard_settings};
    use std::time::Instant;

    #[test]
    fn bell_state_sigma_is_small() {
        let data = simulate_counts(&phi_plus(), &standard_settings(), 257_500, 5).unwrap();
        let t = Instant::now();
        let report = monte_carlo_metrics(&data, &BootstrapOptions { seed: 5, ..Default::default() }).unwrap();
        assert!(t.elapsed().as_secs() < 10);
        assert!(report.fidelity.sigma < 0.01);
        assert!(report.fidelity.sigma > 0.0);
        assert_eq!(report.n_samples, 100);
        assert!(report.fidelity.value > 0.99);
    }

    #[test]
    fn fixed_resampling_has_zero_sigma() {
        let settings = standard_settings();
        let counts = setting_probabilities(&dephased_phi_plus(0.9), &settings)
            .unwrap()
            .iter()
            .map(|p| (p * 1e4).round() as u64)
            .collect();
        let data = CountData::new(settings, counts, 10_000, 0).unwrap();
        for method in [Method::Linear, Method::Mle] {
            let opts = BootstrapOptions { n_samples: 10, method, resampling: Resampling::Fixed, ..Default::default() };
            let r = monte_carlo_metrics(&data, &opts).unwrap();
            for e in [r.fidelity, r.concurrence, r.purity, r.s_value] {
                assert_eq!(e.sigma, 0.0);
            }
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let data = simulate_counts(&phi_plus(), &standard_settings(), 100, 0).unwrap();
        let opts = BootstrapOptions { n_samples: 9, ..Default::default() };
        assert!(matches!(monte_carlo_metrics(&data, &opts), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn deterministic_given_seed() {
        let data = simulate_counts(&dephased_phi_plus(0.979), &standard_settings(), 5_000, 1).unwrap();
        let opts = BootstrapOptions { n_samples: 20, seed: 9, ..Default::default() };
        let a = monte_carlo_metrics(&data, &opts).unwrap();
        let b = monte_carlo_metrics(&data, &opts).unwrap();
        assert_eq!(a, b);
    }

    fn mean_sigma(pairs: u64) -> f64 {
        let truth = dephased_phi_plus(0.979);
        let total: f64 = (0..20)
            .map(|seed| {
                let data = simulate_counts(&truth, &standard_settings(), pairs, seed).unwrap();
                let opts = BootstrapOptions { seed, ..Default::default() };
                monte_carlo_metrics(&data, &opts).unwrap().fidelity.sigma
            })
            .sum();
        total / 20.0
    }

    #[test]
    fn doubling_pairs_shrinks_sigma_by_root_two() {
        let ratio = mean_sigma(20_000) / mean_sigma(40_000);
        assert!((1.2..=1.7).contains(&ratio), "ratio {ratio}");
    }
}
