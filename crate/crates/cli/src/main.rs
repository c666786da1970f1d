use clap::{Args, Parser, Subcommand};
use depsim_cli::config::CountMode;
use depsim_cli::{run, write_artifacts, Command, ConfigError, ExperimentConfig, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "depsim", version, about = "Deterministic entanglement purification simulator")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check a configuration without running it.
    Validate(Opts),
    /// Tomography before and after the transfer.
    Purify(Opts),
    /// CHSH value before and after the transfer across the balance parameter.
    ChshSweep(Opts),
    /// Run a configuration as written, sweeping if it has a sweep section.
    Custom(Opts),
    /// Franson fringe versus sum phase.
    FringeScan(Opts),
}

#[derive(Args)]
struct Opts {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exact probabilities instead of Poisson counts.
    #[arg(long)]
    analytic: bool,
    /// Output directory (overrides output_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte-Carlo resamples per tomography.
    #[arg(long)]
    mc_samples: Option<usize>,
}

impl Opts {
    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.analytic {
            cfg.tomography.mode = CountMode::Analytic;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(n) = self.mc_samples {
            cfg.tomography.n_mc_samples = n;
        }
        Ok(cfg)
    }
}

fn execute(sub: Sub) -> Result<(), RunError> {
    let (command, opts) = match sub {
        Sub::Validate(opts) => {
            let cfg = opts.resolve()?.checked()?;
            println!("configuration valid ({} fringe points, seed {})", cfg.fringe.points, cfg.seed);
            return Ok(());
        }
        Sub::Purify(o) => (Command::Purify, o),
        Sub::ChshSweep(o) => (Command::ChshSweep, o),
        Sub::Custom(o) => (Command::Custom, o),
        Sub::FringeScan(o) => (Command::FringeScan, o),
    };
    let cfg = opts.resolve()?;
    let artifacts = run(command, &cfg)?;
    for p in &artifacts.report.points {
        let label = p.value.map(|v| format!("{} = {v}: ", p.parameter.unwrap_or("value"))).unwrap_or_default();
        let (i, o) = (&p.input.measured, &p.output.measured);
        println!(
            "{label}in  F {:.4} ± {:.4}  C {:.4} ± {:.4}  S {:.4} ± {:.4}",
            i.fidelity.value, i.fidelity.sigma, i.concurrence.value, i.concurrence.sigma, i.s_value.value, i.s_value.sigma
        );
        println!(
            "{label}out F {:.4} ± {:.4}  C {:.4} ± {:.4}  S {:.4} ± {:.4}",
            o.fidelity.value, o.fidelity.sigma, o.concurrence.value, o.concurrence.sigma, o.s_value.value, o.s_value.sigma
        );
    }
    if let Some(f) = &artifacts.report.fringe {
        println!("fringe visibility {:.6} (configured {:.6})", f.visibility, f.configured_visibility);
    }
    let written = write_artifacts(&artifacts, &cfg.output_dir)?;
    println!("wrote {} files to {}", written.len(), cfg.output_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
