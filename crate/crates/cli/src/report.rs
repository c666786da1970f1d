//! The JSON run report.

use crate::config::{CountMode, ExperimentConfig};
use depsim::tomo::{Estimate, MetricsReport, PointMetrics};
use serde::Serialize;

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;
/// Best Bell-state fidelity reported for the physical experiment.
pub const MEASURED_BEST_FIDELITY: f64 = 0.976;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    /// Wall-clock creation time; the only field that differs between identical runs.
    pub generated_at_unix_s: u64,
    pub versions: Versions,
    pub mode: CountMode,
    pub config: ExperimentConfig,
    pub points: Vec<PointReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fringe: Option<FringeReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub depsim: &'static str,
    pub depsim_cli: &'static str,
}

impl Default for Versions {
    fn default() -> Self {
        Self { depsim: depsim::VERSION, depsim_cli: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValueSigma {
    pub value: f64,
    pub sigma: f64,
}

impl From<Estimate> for ValueSigma {
    fn from(e: Estimate) -> Self {
        Self { value: e.value, sigma: e.sigma }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeasuredMetrics {
    pub fidelity: ValueSigma,
    pub concurrence: ValueSigma,
    pub purity: ValueSigma,
    pub s_value: ValueSigma,
    pub mc_samples: usize,
    pub mc_dropped: usize,
}

impl From<&MetricsReport> for MeasuredMetrics {
    fn from(r: &MetricsReport) -> Self {
        Self {
            fidelity: r.fidelity.into(),
            concurrence: r.concurrence.into(),
            purity: r.purity.into(),
            s_value: r.s_value.into(),
            mc_samples: r.n_samples,
            mc_dropped: r.n_dropped,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelMetrics {
    pub fidelity: f64,
    pub concurrence: f64,
    pub purity: f64,
    pub s_value: f64,
}

impl From<&PointMetrics> for ModelMetrics {
    fn from(m: &PointMetrics) -> Self {
        Self { fidelity: m.fidelity, concurrence: m.concurrence, purity: m.purity, s_value: m.s_value }
    }
}

/// Metrics of one tomographed polarization state.
#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    /// Exact values of the simulated state.
    pub model: ModelMetrics,
    /// Values from the reconstruction, with Monte-Carlo sigmas.
    pub measured: MeasuredMetrics,
    /// Postselection weight of the state (long-arm blocking keeps a fraction).
    pub weight: f64,
    pub reconstruction: ReconstructionInfo,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionInfo {
    pub method: &'static str,
    pub iterations: usize,
    pub converged: bool,
    pub loglike: f64,
    pub floor_hits: usize,
    pub total_counts: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferSummary {
    /// Detector combinations (S,S), (S,L), (L,S), (L,L).
    pub port_probs: [f64; 4],
    pub port_probs_sum: f64,
    pub franson_postselection_fraction: f64,
    pub sum_phase_deg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Polarization state with both long arms blocked.
    pub input: StageReport,
    pub transfer: TransferSummary,
    /// Polarization state after the transfer.
    pub output: StageReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FringeReport {
    pub configured_visibility: f64,
    pub visibility: f64,
    /// `(offset_deg, probability)` pairs.
    pub scan: Vec<(f64, f64)>,
}

impl RunReport {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        let generated_at_unix_s = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            generated_at_unix_s,
            versions: Versions::default(),
            mode: config.tomography.mode,
            config: config.clone(),
            points: Vec::new(),
            fringe: None,
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with its timestamp zeroed, for comparing runs.
    pub fn payload(&self) -> String {
        let mut copy = self.clone();
        copy.generated_at_unix_s = 0;
        copy.to_json()
    }
}

/// Explains why the modeled fidelity exceeds the measured one.
pub fn fidelity_gap_note(model_fidelity: f64) -> String {
    format!(
        "model output fidelity to Phi+ is {model_fidelity:.4}; the best measured value is {MEASURED_BEST_FIDELITY:.3}. \
         The model only includes the finite Franson visibility, so imperfections beyond it are not reproduced."
    )
}
