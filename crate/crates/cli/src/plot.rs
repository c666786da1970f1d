//! Whitespace-separated tables for gnuplot.

use crate::experiment::{RunArtifacts, RunError};
use depsim::qcore::DensityMatrix;
use std::fmt::Write;
use std::path::{Path, PathBuf};

/// One row per matrix entry: `row col magnitude phase`.
pub fn bar_table(rho: &DensityMatrix) -> String {
    let mut out = String::from("# row col magnitude phase_rad\n");
    for r in 0..rho.dim() {
        for c in 0..rho.dim() {
            let z = rho.get(r, c);
            writeln!(out, "{r} {c} {:.12} {:.12}", z.norm(), z.arg()).unwrap();
        }
    }
    out
}

/// Fidelity, concurrence, purity and S with sigmas, before and after the transfer.
pub fn sweep_table(run: &RunArtifacts) -> String {
    let name = run.sweep_parameter.map_or("value", |p| p.name());
    let mut out = format!("# {name}");
    for side in ["in", "out"] {
        for m in ["f", "c", "purity", "s"] {
            write!(out, " {m}_{side} {m}_{side}_sigma").unwrap();
        }
    }
    out.push('\n');
    for p in &run.points {
        write!(out, "{}", p.value.unwrap_or(f64::NAN)).unwrap();
        for stage in [&p.input, &p.output] {
            let m = &stage.report.measured;
            for e in [m.fidelity, m.concurrence, m.purity, m.s_value] {
                write!(out, " {:.12} {:.12}", e.value, e.sigma).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn fringe_table(scan: &[(f64, f64)]) -> String {
    let mut out = String::from("# offset_deg probability\n");
    for (phi, p) in scan {
        writeln!(out, "{:.6} {:.12}", phi.to_degrees(), p).unwrap();
    }
    out
}

pub(crate) fn write_file(dir: &Path, name: &str, text: &str, written: &mut Vec<PathBuf>) -> Result<(), RunError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|source| RunError::Io { path: path.clone(), source })?;
    written.push(path);
    Ok(())
}

/// File-name suffix of point `i`; empty for single-point runs.
pub(crate) fn suffix(run: &RunArtifacts, i: usize) -> String {
    if run.points.len() > 1 {
        format!("_{i:02}")
    } else {
        String::new()
    }
}

/// Writes bar tables of the reconstructed states, the sweep table and the
/// fringe table, whichever apply. Returns the paths written.
pub fn emit_plot_data(run: &RunArtifacts, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let mut written = Vec::new();
    for (i, p) in run.points.iter().enumerate() {
        let sfx = suffix(run, i);
        write_file(dir, &format!("bars_in{sfx}.dat"), &bar_table(&p.input.reconstructed), &mut written)?;
        write_file(dir, &format!("bars_out{sfx}.dat"), &bar_table(&p.output.reconstructed), &mut written)?;
    }
    if run.points.len() > 1 {
        write_file(dir, "sweep.dat", &sweep_table(run), &mut written)?;
    }
    if let Some(scan) = &run.fringe {
        write_file(dir, "fringe.dat", &fringe_table(scan), &mut written)?;
    }
    Ok(written)
}
