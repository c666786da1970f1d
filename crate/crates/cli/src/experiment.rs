//! The experiment pipelines: source, noisy channel, transfer, tomography.

use crate::config::{ConfigError, CountMode, Diagnostic, ExperimentConfig, PolInputKind, SweepParameter, DEFAULT_SWEEP_P};
use crate::report::{
    fidelity_gap_note, FringeReport, MeasuredMetrics, ModelMetrics, PointReport, ReconstructionInfo, RunReport, StageReport,
    TransferSummary,
};
use depsim::optics::{apply_noisy_channel, make_source_state};
use depsim::qcore::{DensityMatrix, PhotonPairState};
use depsim::rng::{derive_seed, stage, substream};
use depsim::tomo::{
    counts_from_probabilities, linear_inversion_from, metrics_of, monte_carlo_metrics, reconstruct, setting_probabilities,
    standard_settings, BootstrapOptions, CountData, Method, MetricsReport, MleOptions, Observations, ReconstructionResult,
    Resampling,
};
use depsim::transfer::{
    block_long_arms, default_scan_phases, fringe_visibility, sum_phase_scan, transfer, transfer_sampled, TransferOutcome,
};
use rayon::prelude::*;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage}: {source}")]
    Model { stage: String, source: depsim::Error },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn at<T>(stage: &str, r: depsim::Result<T>) -> Result<T, RunError> {
    r.map_err(|source| RunError::Model { stage: stage.to_string(), source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Purify,
    ChshSweep,
    Custom,
    FringeScan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Purify => "purify",
            Command::ChshSweep => "chsh-sweep",
            Command::Custom => "custom",
            Command::FringeScan => "fringe-scan",
        }
    }
}

/// A tomographed state with what was used to characterize it.
#[derive(Debug, Clone)]
pub struct Tomographed {
    pub truth: DensityMatrix,
    pub reconstructed: DensityMatrix,
    pub counts: Option<CountData>,
    pub report: StageReport,
}

#[derive(Debug, Clone)]
pub struct PointArtifacts {
    pub value: Option<f64>,
    pub input: Tomographed,
    pub output: Tomographed,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub command: Command,
    pub report: RunReport,
    pub sweep_parameter: Option<SweepParameter>,
    pub points: Vec<PointArtifacts>,
    /// `(offset_rad, probability)`.
    pub fringe: Option<Vec<(f64, f64)>>,
}

fn pipeline_state(cfg: &ExperimentConfig) -> Result<PhotonPairState, RunError> {
    let source = at("source", make_source_state(&cfg.source.to_core()))?;
    at("channel", apply_noisy_channel(&source, &cfg.channel.to_core()))
}

fn with_value(cfg: &ExperimentConfig, parameter: SweepParameter, value: f64) -> ExperimentConfig {
    let mut c = cfg.clone();
    match parameter {
        SweepParameter::P => c.source.balance_p = value,
        SweepParameter::Visibility => c.source.franson_visibility = value,
        SweepParameter::SumPhase => c.source.sum_phase_deg = value,
    }
    c
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Linear => "linear",
        Method::Mle => "mle",
    }
}

fn stage_report(
    model: &depsim::tomo::PointMetrics,
    measured: &MetricsReport,
    weight: f64,
    recon: &ReconstructionResult,
    total_counts: u64,
) -> StageReport {
    StageReport {
        model: ModelMetrics::from(model),
        measured: MeasuredMetrics::from(measured),
        weight,
        reconstruction: ReconstructionInfo {
            method: method_name(recon.method),
            iterations: recon.iterations,
            converged: recon.converged,
            loglike: recon.loglike,
            floor_hits: recon.floor_hits,
            total_counts,
        },
    }
}

/// Tomography of `truth`. In sampled mode `probs` overrides the per-setting
/// detection probabilities (used for per-setting phase jitter).
fn tomograph(
    cfg: &ExperimentConfig,
    truth: &DensityMatrix,
    weight: f64,
    seed: u64,
    probs: Option<Vec<f64>>,
    stage_name: &str,
) -> Result<Tomographed, RunError> {
    let settings = standard_settings();
    let angles = cfg.chsh.to_core();
    let t = &cfg.tomography;
    let model = at(stage_name, metrics_of(truth, &angles))?;
    match t.mode {
        CountMode::Analytic => {
            let obs = at(stage_name, Observations::exact(truth, &settings, t.pairs_per_setting as f64))?;
            let recon = at(stage_name, linear_inversion_from(&obs))?;
            let measured = MetricsReport::exact(&at(stage_name, metrics_of(&recon.rho, &angles))?);
            Ok(Tomographed {
                truth: truth.clone(),
                report: stage_report(&model, &measured, weight, &recon, 0),
                reconstructed: recon.rho,
                counts: None,
            })
        }
        CountMode::Sampled => {
            let probs = match probs {
                Some(p) => p,
                None => at(stage_name, setting_probabilities(truth, &settings))?,
            };
            let data = at(stage_name, counts_from_probabilities(&settings, &probs, t.pairs_per_setting, seed))?;
            let method: Method = t.method.into();
            let mle = MleOptions::default();
            let recon = at(stage_name, reconstruct(&data, method, &mle))?;
            let opts = BootstrapOptions {
                n_samples: t.n_mc_samples,
                seed,
                method,
                resampling: Resampling::Poisson,
                angles,
                mle,
            };
            let measured = at(stage_name, monte_carlo_metrics(&data, &opts))?;
            Ok(Tomographed {
                truth: truth.clone(),
                report: stage_report(&model, &measured, weight, &recon, data.total()),
                reconstructed: recon.rho,
                counts: Some(data),
            })
        }
    }
}

/// Per-setting output probabilities, each setting with its own lock-jitter draw.
fn jittered_probabilities(cfg: &ExperimentConfig, state: &PhotonPairState, seed: u64) -> Result<Vec<f64>, RunError> {
    let icfg = cfg.interferometer.to_core();
    standard_settings()
        .par_iter()
        .enumerate()
        .map(|(j, s)| {
            let mut rng = substream(seed, stage::JITTER, j as u64);
            let out = at("transfer", transfer_sampled(state, &icfg, &mut rng))?;
            let p = at("output tomography", setting_probabilities(&out.pol_out, std::slice::from_ref(s)))?;
            Ok(p[0])
        })
        .collect()
}

fn transfer_summary(out: &TransferOutcome, cfg: &ExperimentConfig) -> TransferSummary {
    TransferSummary {
        port_probs: out.port_probs,
        port_probs_sum: out.port_probs.iter().sum(),
        franson_postselection_fraction: out.franson_postselection_fraction,
        sum_phase_deg: cfg.interferometer.phase_a_deg + cfg.interferometer.phase_b_deg,
    }
}

fn run_point(cfg: &ExperimentConfig, index: usize, value: Option<f64>) -> Result<(PointArtifacts, TransferSummary), RunError> {
    let state = pipeline_state(cfg)?;
    let blocked = at("input (long arms blocked)", block_long_arms(&state))?;
    let outcome = at("transfer", transfer(&state, &cfg.interferometer.to_core()))?;

    let seed_in = derive_seed(cfg.seed, stage::SWEEP, 2 * index as u64);
    let seed_out = derive_seed(cfg.seed, stage::SWEEP, 2 * index as u64 + 1);
    let input = tomograph(cfg, &blocked.polarization(), blocked.weight(), seed_in, None, "input tomography")?;
    let jitter = cfg.tomography.mode == CountMode::Sampled && cfg.interferometer.phase_jitter_sigma_deg > 0.0;
    let probs = if jitter { Some(jittered_probabilities(cfg, &state, seed_out)?) } else { None };
    let output = tomograph(cfg, &outcome.pol_out, outcome.joint_out.weight(), seed_out, probs, "output tomography")?;
    Ok((PointArtifacts { value, input, output }, transfer_summary(&outcome, cfg)))
}

/// Runs every point in parallel; results keep the order of `values`.
fn run_points(
    command: Command,
    cfg: &ExperimentConfig,
    sweep: Option<(SweepParameter, Vec<f64>)>,
) -> Result<RunArtifacts, RunError> {
    let cfg = cfg.clone().checked()?;
    let jobs: Vec<(ExperimentConfig, Option<f64>)> = match &sweep {
        Some((param, values)) => values.iter().map(|&v| (with_value(&cfg, *param, v), Some(v))).collect(),
        None => vec![(cfg.clone(), None)],
    };
    let results: Vec<(PointArtifacts, TransferSummary)> =
        jobs.par_iter().enumerate().map(|(i, (c, v))| run_point(c, i, *v)).collect::<Result<_, _>>()?;

    let mut report = RunReport::new(command.name(), &cfg);
    let parameter = sweep.as_ref().map(|(p, _)| *p);
    for (p, summary) in &results {
        report.points.push(PointReport {
            parameter: parameter.map(|p| p.name()),
            value: p.value,
            input: p.input.report.clone(),
            transfer: summary.clone(),
            output: p.output.report.clone(),
        });
    }
    if let Some((p, _)) = results.first() {
        report.notes.push(fidelity_gap_note(p.output.report.model.fidelity));
    }
    report.notes.push(match cfg.tomography.mode {
        CountMode::Analytic => "analytic mode: exact probabilities, all sigmas are zero".into(),
        CountMode::Sampled => format!(
            "sigmas are one standard deviation over {} Poisson resamples of the observed counts",
            cfg.tomography.n_mc_samples
        ),
    });
    Ok(RunArtifacts {
        command,
        report,
        sweep_parameter: parameter,
        points: results.into_iter().map(|(p, _)| p).collect(),
        fringe: None,
    })
}

/// Tomography before and after the transfer for a single configuration.
pub fn run_purification(cfg: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    run_points(Command::Purify, cfg, None)
}

/// CHSH values before and after the transfer across the balance parameter.
pub fn run_chsh_sweep(cfg: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    let mut diags = Vec::new();
    if cfg.source.pol_input != PolInputKind::BellP {
        diags.push(Diagnostic {
            field: "source.pol_input".into(),
            message: "chsh-sweep varies the balance parameter and needs pol_input = \"bell_p\"".into(),
        });
    }
    let values = match &cfg.sweep {
        None => DEFAULT_SWEEP_P.to_vec(),
        Some(s) if s.parameter == SweepParameter::P => s.values.clone(),
        Some(_) => {
            diags.push(Diagnostic { field: "sweep.parameter".into(), message: "chsh-sweep only sweeps \"p\"".into() });
            vec![]
        }
    };
    if !diags.is_empty() {
        return Err(ConfigError::Invalid(diags).into());
    }
    run_points(Command::ChshSweep, cfg, Some((SweepParameter::P, values)))
}

/// Any configuration; sweeps over whichever parameter the config names.
pub fn run_custom(cfg: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    let sweep = cfg.sweep.as_ref().map(|s| (s.parameter, s.values.clone()));
    run_points(Command::Custom, cfg, sweep)
}

/// Coincidence fringe versus an offset added to the sum phase.
pub fn run_fringe_scan(cfg: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    let cfg = cfg.clone().checked()?;
    let state = pipeline_state(&cfg)?;
    let phases = default_scan_phases(cfg.fringe.points);
    let scan = at("fringe scan", sum_phase_scan(&state, &cfg.interferometer.to_core(), &phases))?;
    let mut report = RunReport::new(Command::FringeScan.name(), &cfg);
    report.fringe = Some(FringeReport {
        configured_visibility: cfg.source.franson_visibility,
        visibility: fringe_visibility(&scan),
        scan: scan.iter().map(|&(phi, p)| (phi.to_degrees(), p)).collect(),
    });
    Ok(RunArtifacts { command: Command::FringeScan, report, sweep_parameter: None, points: vec![], fringe: Some(scan) })
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    match command {
        Command::Purify => run_purification(cfg),
        Command::ChshSweep => run_chsh_sweep(cfg),
        Command::Custom => run_custom(cfg),
        Command::FringeScan => run_fringe_scan(cfg),
    }
}
