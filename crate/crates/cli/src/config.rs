//! Experiment configuration as read from TOML.
//!
//! Angles are given in degrees in the file and converted to radians when the
//! core configuration types are built. Every field has a default, so an empty
//! file is a complete configuration.

use depsim::optics::{NoiseStage, NoisyChannelSpec, PolInput, SourceConfig, WaveplateKind, WaveplateSpec, DEFAULT_PLATE_STEPS};
use depsim::qcore::Photon;
use depsim::tomo::{ChshAngles, Method, DEFAULT_PAIRS_PER_SETTING, DEFAULT_MC_SAMPLES, MIN_MC_SAMPLES};
use depsim::transfer::{InterferometerConfig, DEFAULT_COINCIDENCE_WINDOW_NS, DEFAULT_DELTA_T_NS};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

pub const DEFAULT_FRINGE_POINTS: usize = 72;
pub const DEFAULT_OUTPUT_DIR: &str = "depsim-out";
/// Balance parameters of the default CHSH sweep.
pub const DEFAULT_SWEEP_P: [f64; 5] = [0.0, 0.1, 0.25, 0.4, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub source: SourceSection,
    pub channel: ChannelSection,
    pub interferometer: InterferometerSection,
    pub tomography: TomographySection,
    pub chsh: ChshSection,
    pub sweep: Option<SweepSection>,
    pub fringe: FringeSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            source: SourceSection::default(),
            channel: ChannelSection::default(),
            interferometer: InterferometerSection::default(),
            tomography: TomographySection::default(),
            chsh: ChshSection::default(),
            sweep: None,
            fringe: FringeSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolInputKind {
    BellP,
    PureHv,
    PureVh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSection {
    pub pol_input: PolInputKind,
    pub balance_p: f64,
    pub franson_visibility: f64,
    pub sum_phase_deg: f64,
}

impl Default for SourceSection {
    fn default() -> Self {
        let core = SourceConfig::default();
        Self {
            pol_input: PolInputKind::BellP,
            balance_p: core.balance_p,
            franson_visibility: core.franson_visibility,
            sum_phase_deg: core.sum_phase.to_degrees(),
        }
    }
}

impl SourceSection {
    pub fn to_core(&self) -> SourceConfig {
        SourceConfig {
            balance_p: self.balance_p,
            franson_visibility: self.franson_visibility,
            sum_phase: self.sum_phase_deg.to_radians(),
            pol_input: match self.pol_input {
                PolInputKind::BellP => PolInput::BellP,
                PolInputKind::PureHv => PolInput::PureHV,
                PolInputKind::PureVh => PolInput::PureVH,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateKind {
    Half,
    Quarter,
}

impl From<PlateKind> for WaveplateKind {
    fn from(k: PlateKind) -> Self {
        match k {
            PlateKind::Half => WaveplateKind::Half,
            PlateKind::Quarter => WaveplateKind::Quarter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arm {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateSpec {
    pub plate: PlateKind,
    pub angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageSpec {
    RotatingPlate {
        arm: Arm,
        #[serde(default = "half_plate")]
        plate: PlateKind,
        #[serde(default = "default_steps")]
        steps: usize,
    },
    Coherent {
        #[serde(default)]
        arm_a: Vec<PlateSpec>,
        #[serde(default)]
        arm_b: Vec<PlateSpec>,
    },
}

fn half_plate() -> PlateKind {
    PlateKind::Half
}

fn default_steps() -> usize {
    DEFAULT_PLATE_STEPS
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub stages: Vec<StageSpec>,
}

impl ChannelSection {
    pub fn to_core(&self) -> NoisyChannelSpec {
        let plates = |v: &[PlateSpec]| -> Vec<WaveplateSpec> {
            v.iter().map(|p| WaveplateSpec::new(p.plate.into(), p.angle_deg.to_radians())).collect()
        };
        let stages = self
            .stages
            .iter()
            .map(|s| match s {
                StageSpec::RotatingPlate { arm, plate, steps } => NoiseStage::RotatingPlate {
                    arm: match arm {
                        Arm::A => Photon::A,
                        Arm::B => Photon::B,
                    },
                    kind: (*plate).into(),
                    steps: *steps,
                },
                StageSpec::Coherent { arm_a, arm_b } => NoiseStage::Coherent { arm_a: plates(arm_a), arm_b: plates(arm_b) },
            })
            .collect();
        NoisyChannelSpec { stages }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerSection {
    pub phase_a_deg: f64,
    pub phase_b_deg: f64,
    pub delta_t_ns: f64,
    pub coincidence_window_ns: f64,
    pub phase_jitter_sigma_deg: f64,
}

impl Default for InterferometerSection {
    fn default() -> Self {
        Self {
            phase_a_deg: 0.0,
            phase_b_deg: 0.0,
            delta_t_ns: DEFAULT_DELTA_T_NS,
            coincidence_window_ns: DEFAULT_COINCIDENCE_WINDOW_NS,
            phase_jitter_sigma_deg: 0.0,
        }
    }
}

impl InterferometerSection {
    pub fn to_core(&self) -> InterferometerConfig {
        InterferometerConfig {
            phase_a: self.phase_a_deg.to_radians(),
            phase_b: self.phase_b_deg.to_radians(),
            delta_t_ns: self.delta_t_ns,
            coincidence_window_ns: self.coincidence_window_ns,
            phase_jitter_sigma: self.phase_jitter_sigma_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Mle,
    Linear,
}

impl From<MethodKind> for Method {
    fn from(m: MethodKind) -> Self {
        match m {
            MethodKind::Mle => Method::Mle,
            MethodKind::Linear => Method::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Poisson counts, reconstruction, bootstrap sigmas.
    Sampled,
    /// Exact probabilities, zero sigmas.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographySection {
    pub mode: CountMode,
    pub pairs_per_setting: u64,
    pub method: MethodKind,
    pub n_mc_samples: usize,
}

impl Default for TomographySection {
    fn default() -> Self {
        Self {
            mode: CountMode::Sampled,
            pairs_per_setting: DEFAULT_PAIRS_PER_SETTING,
            method: MethodKind::Mle,
            n_mc_samples: DEFAULT_MC_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChshSection {
    pub alpha_deg: f64,
    pub alpha_prime_deg: f64,
    pub beta_deg: f64,
    pub beta_prime_deg: f64,
}

impl Default for ChshSection {
    fn default() -> Self {
        let a = ChshAngles::default();
        Self {
            alpha_deg: a.alpha.to_degrees(),
            alpha_prime_deg: a.alpha_prime.to_degrees(),
            beta_deg: a.beta.to_degrees(),
            beta_prime_deg: a.beta_prime.to_degrees(),
        }
    }
}

impl ChshSection {
    pub fn to_core(&self) -> ChshAngles {
        ChshAngles {
            alpha: self.alpha_deg.to_radians(),
            alpha_prime: self.alpha_prime_deg.to_radians(),
            beta: self.beta_deg.to_radians(),
            beta_prime: self.beta_prime_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Source balance parameter.
    P,
    /// Franson visibility.
    Visibility,
    /// Locked sum phase, degrees.
    SumPhase,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::P => "p",
            SweepParameter::Visibility => "visibility",
            SweepParameter::SumPhase => "sum_phase_deg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FringeSection {
    pub points: usize,
}

impl Default for FringeSection {
    fn default() -> Self {
        Self { points: DEFAULT_FRINGE_POINTS }
    }
}

/// One violated invariant, named by its dotted config path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", format_parse(.line, .column, .message))]
    Parse { line: Option<usize>, column: Option<usize>, message: String },
    #[error("{} invalid setting(s):\n{}", .0.len(), .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

fn format_parse(line: &Option<usize>, column: &Option<usize>, message: &str) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!("config parse error at line {l}, column {c}: {message}"),
        _ => format!("config parse error: {message}"),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = match e.span() {
                Some(span) => {
                    let before = &text[..span.start.min(text.len())];
                    let line = before.matches('\n').count() + 1;
                    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                    (Some(line), Some(column))
                }
                None => (None, None),
            };
            ConfigError::Parse { line, column, message: e.message().trim().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every invariant without running anything.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut err = |field: &str, message: String| out.push(Diagnostic { field: field.into(), message });

        let s = &self.source;
        if !(0.0..=0.5).contains(&s.balance_p) {
            err("source.balance_p", format!("must lie in [0, 0.5], got {}", s.balance_p));
        }
        if !(0.0..=1.0).contains(&s.franson_visibility) {
            err("source.franson_visibility", format!("must lie in [0, 1], got {}", s.franson_visibility));
        }
        if !s.sum_phase_deg.is_finite() {
            err("source.sum_phase_deg", "must be finite".into());
        }

        for (i, stage) in self.channel.stages.iter().enumerate() {
            match stage {
                StageSpec::RotatingPlate { steps, .. } => {
                    if *steps < 4 || steps % 2 != 0 {
                        err(&format!("channel.stages[{i}].steps"), format!("must be even and at least 4, got {steps}"));
                    }
                }
                StageSpec::Coherent { arm_a, arm_b } => {
                    for (arm, plates) in [("arm_a", arm_a), ("arm_b", arm_b)] {
                        for (k, p) in plates.iter().enumerate() {
                            if !p.angle_deg.is_finite() {
                                err(&format!("channel.stages[{i}].{arm}[{k}].angle_deg"), "must be finite".into());
                            }
                        }
                    }
                }
            }
        }

        let f = &self.interferometer;
        if !f.phase_a_deg.is_finite() {
            err("interferometer.phase_a_deg", "must be finite".into());
        }
        if !f.phase_b_deg.is_finite() {
            err("interferometer.phase_b_deg", "must be finite".into());
        }
        if !(f.delta_t_ns > 0.0) {
            err("interferometer.delta_t_ns", format!("must be positive, got {}", f.delta_t_ns));
        }
        if !(f.coincidence_window_ns > 0.0) {
            err("interferometer.coincidence_window_ns", format!("must be positive, got {}", f.coincidence_window_ns));
        } else if f.delta_t_ns > 0.0 && f.coincidence_window_ns >= f.delta_t_ns {
            err(
                "interferometer.coincidence_window_ns",
                format!(
                    "coincidence window ({} ns) must be shorter than the arm imbalance delta_t_ns ({} ns)",
                    f.coincidence_window_ns, f.delta_t_ns
                ),
            );
        }
        if !(f.phase_jitter_sigma_deg >= 0.0) || !f.phase_jitter_sigma_deg.is_finite() {
            err("interferometer.phase_jitter_sigma_deg", format!("must be finite and non-negative, got {}", f.phase_jitter_sigma_deg));
        }

        let t = &self.tomography;
        if t.pairs_per_setting == 0 {
            err("tomography.pairs_per_setting", "must be positive".into());
        }
        if t.n_mc_samples < MIN_MC_SAMPLES {
            err("tomography.n_mc_samples", format!("must be at least {MIN_MC_SAMPLES}, got {}", t.n_mc_samples));
        }

        let c = &self.chsh;
        for (name, v) in [("alpha_deg", c.alpha_deg), ("alpha_prime_deg", c.alpha_prime_deg), ("beta_deg", c.beta_deg), ("beta_prime_deg", c.beta_prime_deg)] {
            if !v.is_finite() {
                err(&format!("chsh.{name}"), "must be finite".into());
            }
        }

        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                err("sweep.values", "must not be empty".into());
            }
            for (i, &v) in sw.values.iter().enumerate() {
                let ok = match sw.parameter {
                    SweepParameter::P => (0.0..=0.5).contains(&v),
                    SweepParameter::Visibility => (0.0..=1.0).contains(&v),
                    SweepParameter::SumPhase => v.is_finite(),
                };
                if !ok {
                    err(&format!("sweep.values[{i}]"), format!("{v} is outside the domain of {}", sw.parameter.name()));
                }
            }
        }

        if self.fringe.points < 3 {
            err("fringe.points", format!("must be at least 3, got {}", self.fringe.points));
        }
        if self.output_dir.as_os_str().is_empty() {
            err("output_dir", "must not be empty".into());
        }
        out
    }

    /// [`validate`](Self::validate) as a `Result`.
    pub fn checked(self) -> Result<Self, ConfigError> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(self)
        } else {
            Err(ConfigError::Invalid(diags))
        }
    }
}
