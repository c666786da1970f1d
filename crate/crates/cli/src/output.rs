//! Writing a run to its output directory.

use crate::experiment::{Command, RunArtifacts, RunError};
use crate::plot::{emit_plot_data, suffix, write_file};
use depsim::qcore::dump::to_dump;
use std::fmt::Write;
use std::path::{Path, PathBuf};

/// `p,s_in,s_in_sigma,s_out,s_out_sigma`, one row per sweep point.
pub fn chsh_sweep_csv(run: &RunArtifacts) -> String {
    let mut out = String::from("p,s_in,s_in_sigma,s_out,s_out_sigma\n");
    for p in &run.points {
        let (i, o) = (p.input.report.measured.s_value, p.output.report.measured.s_value);
        writeln!(out, "{},{:.12},{:.12},{:.12},{:.12}", p.value.unwrap_or(f64::NAN), i.value, i.sigma, o.value, o.sigma).unwrap();
    }
    out
}

/// Every metric with its sigma, one row per sweep point.
pub fn sweep_csv(run: &RunArtifacts) -> String {
    let name = run.sweep_parameter.map_or("value", |p| p.name());
    let mut out = name.to_string();
    for side in ["in", "out"] {
        for m in ["fidelity", "concurrence", "purity", "s"] {
            write!(out, ",{m}_{side},{m}_{side}_sigma").unwrap();
        }
    }
    out.push('\n');
    for p in &run.points {
        write!(out, "{}", p.value.unwrap_or(f64::NAN)).unwrap();
        for stage in [&p.input, &p.output] {
            let m = &stage.report.measured;
            for e in [m.fidelity, m.concurrence, m.purity, m.s_value] {
                write!(out, ",{:.12},{:.12}", e.value, e.sigma).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Writes the report, density-matrix dumps, count files, series CSVs and plot tables.
pub fn write_artifacts(run: &RunArtifacts, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    write_file(dir, "report.json", &run.report.to_json(), &mut written)?;
    for (i, p) in run.points.iter().enumerate() {
        let sfx = suffix(run, i);
        write_file(dir, &format!("rho_in{sfx}.dump"), &to_dump(&p.input.reconstructed), &mut written)?;
        write_file(dir, &format!("rho_out{sfx}.dump"), &to_dump(&p.output.reconstructed), &mut written)?;
        if let Some(c) = &p.input.counts {
            write_file(dir, &format!("counts_in{sfx}.csv"), &c.to_csv(), &mut written)?;
        }
        if let Some(c) = &p.output.counts {
            write_file(dir, &format!("counts_out{sfx}.csv"), &c.to_csv(), &mut written)?;
        }
    }
    match run.command {
        Command::ChshSweep => write_file(dir, "chsh_sweep.csv", &chsh_sweep_csv(run), &mut written)?,
        _ if run.points.len() > 1 => write_file(dir, "sweep.csv", &sweep_csv(run), &mut written)?,
        _ => {}
    }
    written.extend(emit_plot_data(run, dir)?);
    Ok(written)
}
