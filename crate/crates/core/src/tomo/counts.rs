use super::settings::{MeasurementSetting, PartySetting};
use crate::error::{Error, Result};
use crate::qcore::linalg;
use crate::qcore::DensityMatrix;
use crate::rng::{stage, substream};
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use std::fmt::Write;

pub const COINCIDENCE_RATE_CPS: f64 = 10.3e3;
pub const INTEGRATION_TIME_S: f64 = 25.0;
/// Coincidence rate times integration time.
pub const DEFAULT_PAIRS_PER_SETTING: u64 = (COINCIDENCE_RATE_CPS * INTEGRATION_TIME_S) as u64;

const CSV_HEADER: &str = "setting_index,theta_a,qwp_a,qwp_theta_a,theta_b,qwp_b,qwp_theta_b,count";
/// Counts larger than this multiple of the pair budget are rejected as corrupt.
const SANITY_FACTOR: u64 = 50;

/// Coincidence counts for a list of analyzer settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CountData {
    pub settings: Vec<MeasurementSetting>,
    pub counts: Vec<u64>,
    pub pairs_per_setting: u64,
    pub seed: u64,
}

impl CountData {
    pub fn new(settings: Vec<MeasurementSetting>, counts: Vec<u64>, pairs_per_setting: u64, seed: u64) -> Result<Self> {
        let data = Self { settings, counts, pairs_per_setting, seed };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.settings.len() != self.counts.len() {
            return Err(Error::InvalidData(format!(
                "{} settings but {} counts",
                self.settings.len(),
                self.counts.len()
            )));
        }
        if self.pairs_per_setting == 0 {
            return Err(Error::InvalidData("pairs_per_setting must be positive".into()));
        }
        let bound = SANITY_FACTOR.saturating_mul(self.pairs_per_setting);
        if let Some((i, c)) = self.counts.iter().enumerate().find(|(_, &c)| c > bound) {
            return Err(Error::InvalidData(format!("count {c} at setting {i} exceeds {bound}")));
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for (i, (s, n)) in self.settings.iter().zip(&self.counts).enumerate() {
            let party = |p: &PartySetting| {
                format!(
                    "{:.6},{},{:.6}",
                    p.polarizer_angle.to_degrees(),
                    u8::from(p.qwp_in),
                    p.qwp_angle.to_degrees()
                )
            };
            writeln!(out, "{i},{},{},{n}", party(&s.a), party(&s.b)).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str, pairs_per_setting: u64, seed: u64) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            Some((i, h)) => return Err(Error::Parse { line: i + 1, message: format!("unexpected header `{h}`") }),
            None => return Err(Error::Parse { line: 1, message: "empty count file".into() }),
        }
        let mut settings = Vec::new();
        let mut counts = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let err = |message: String| Error::Parse { line: lineno, message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 8 {
                return Err(err(format!("expected 8 fields, found {}", fields.len())));
            }
            let index: usize = fields[0].parse().map_err(|_| err(format!("bad setting index `{}`", fields[0])))?;
            if index != settings.len() {
                return Err(err(format!("setting index {index} out of sequence")));
            }
            let angle = |f: &str| -> Result<f64> {
                f.parse::<f64>().map(f64::to_radians).map_err(|_| err(format!("bad angle `{f}`")))
            };
            let flag = |f: &str| -> Result<bool> {
                match f {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(err(format!("bad quarter-wave flag `{f}`"))),
                }
            };
            let a = PartySetting::new(angle(fields[1])?, flag(fields[2])?, angle(fields[3])?);
            let b = PartySetting::new(angle(fields[4])?, flag(fields[5])?, angle(fields[6])?);
            settings.push(MeasurementSetting { a, b });
            counts.push(fields[7].parse().map_err(|_| err(format!("bad count `{}`", fields[7])))?);
        }
        Self::new(settings, counts, pairs_per_setting, seed)
    }
}

/// `tr(ρ Π_A⊗Π_B)` for every setting.
pub fn setting_probabilities(rho: &DensityMatrix, settings: &[MeasurementSetting]) -> Result<Vec<f64>> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    Ok(settings
        .iter()
        .map(|s| linalg::trace(&(rho.matrix() * s.projector())).re.max(0.0))
        .collect())
}

/// Poisson counts with mean `pairs_per_setting · tr(ρΠ)`; setting `j` draws
/// from its own substream of `seed`, so the result does not depend on thread count.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    pairs_per_setting: u64,
    seed: u64,
) -> Result<CountData> {
    let probs = setting_probabilities(rho, settings)?;
    counts_from_probabilities(settings, &probs, pairs_per_setting, seed)
}

/// Same draw as [`simulate_counts`] for precomputed per-setting probabilities.
pub fn counts_from_probabilities(
    settings: &[MeasurementSetting],
    probs: &[f64],
    pairs_per_setting: u64,
    seed: u64,
) -> Result<CountData> {
    if probs.len() != settings.len() {
        return Err(Error::InvalidData(format!("{} settings but {} probabilities", settings.len(), probs.len())));
    }
    let counts = probs
        .par_iter()
        .enumerate()
        .map(|(j, &p)| {
            let mean = pairs_per_setting as f64 * p;
            if !(mean > 0.0) {
                return 0;
            }
            let mut rng = substream(seed, stage::COUNTS, j as u64);
            Poisson::new(mean).expect("positive finite mean").sample(&mut rng) as u64
        })
        .collect();
    CountData::new(settings.to_vec(), counts, pairs_per_setting, seed)
}
