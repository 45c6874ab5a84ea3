//! CSV writers. Numbers carry 15 significant digits so published
//! 15-digit values can be compared directly.

use std::fs::File;
use std::path::Path;

use csv::Writer;

use frac_pp::mms::ConvergenceReport;
use frac_pp::riesz::OperatorMatrix;
use frac_pp::stepper::Perturbation;
use frac_pp::{GridSpec, RunOutput};

use crate::error::CliError;

pub fn num(v: f64) -> String {
    // the recurrences can produce -0.0 where a weight vanishes exactly
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.14e}")
}

fn writer(path: &Path) -> Result<Writer<File>, CliError> {
    Ok(Writer::from_path(path)?)
}

/// `t, x, N, P` at every kept level, boundary values included.
pub fn write_trajectory(path: &Path, out: &RunOutput, grid: &GridSpec, stride: usize) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["t", "x", "N", "P"])?;
    let nodes = grid.nodes();
    for k in out.snapshot_indices(stride) {
        let (n, p) = out.history.level(k).with_ghosts()?;
        let t = num(grid.time(k));
        for ((x, n), p) in nodes.iter().zip(&n).zip(&p) {
            w.write_record([t.as_str(), &num(*x), &num(*n), &num(*p)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-level extremes and the guard flag.
pub fn write_summary(path: &Path, out: &RunOutput) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["k", "minN", "maxN", "minP", "maxP", "guard_flag"])?;
    for r in &out.reports {
        w.write_record([
            r.time_index.to_string(),
            num(r.min_n),
            num(r.max_n),
            num(r.min_p),
            num(r.max_p),
            u8::from(r.guard_violation.is_some()).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per level; rates are empty on the first row. With `verbose` the
/// errors maximised over all time levels are appended.
pub fn write_convergence(path: &Path, report: &ConvergenceReport, verbose: bool) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let mut head = vec!["level", "h_or_tau", "e_N", "rate_N", "e_P", "rate_P"];
    if verbose {
        head.extend(["e_N_all_levels", "e_P_all_levels"]);
    }
    w.write_record(&head)?;
    for (j, (s, e)) in report.steps.iter().zip(&report.errors).enumerate() {
        let (rn, rp) = if j == 0 {
            (String::new(), String::new())
        } else {
            (num(report.rates_n[j - 1]), num(report.rates_p[j - 1]))
        };
        let mut row = vec![j.to_string(), num(*s), num(e.e_n), rn, num(e.e_p), rp];
        if verbose {
            row.extend([num(e.e_n_all), num(e.e_p_all)]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_weights(path: &Path, values: &[f64]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["j", "value"])?;
    for (j, v) in values.iter().enumerate() {
        w.write_record([j.to_string(), num(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stability(path: &Path, rows: &[(f64, f64, Perturbation)]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["tau", "epsilon", "max_divergence", "ratio"])?;
    for (tau, eps, p) in rows {
        w.write_record([num(*tau), num(*eps), num(p.max_divergence), num(p.ratio())])?;
    }
    w.flush()?;
    Ok(())
}

/// Dense matrix as `row, col, value` triples, zero-based.
pub fn write_matrix(path: &Path, m: &OperatorMatrix) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["row", "col", "value"])?;
    for (r, row) in m.rows().iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            w.write_record([r.to_string(), c.to_string(), num(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}
