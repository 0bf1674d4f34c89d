//! Output files: raw samples and CSV plot data.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use alifs_core::sim::TailCurve;
use anyhow::Context;

/// Writes samples as consecutive little-endian `f64`.
pub fn write_samples_bin(path: &Path, samples: &[f64]) -> anyhow::Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for x in samples {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_samples_bin`].
pub fn read_samples_bin(path: &Path) -> anyhow::Result<Vec<f64>> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?)
        .read_to_end(&mut bytes)?;
    anyhow::ensure!(
        bytes.len() % 8 == 0,
        "{}: length is not a multiple of 8",
        path.display()
    );
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// One column `x` per sample.
pub fn write_samples_csv(path: &Path, samples: &[f64]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x"])?;
    for x in samples {
        w.write_record([fmt(*x)])?;
    }
    w.flush()?;
    Ok(())
}

/// Tail curve with columns `threshold, left, right, ci_lo, ci_hi`; the
/// interval is the right tail's. `tailcurve_ci.csv` carries both intervals.
pub fn write_tail_curve(dir: &Path, curve: &TailCurve) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(dir.join("tailcurve.csv"))?;
    w.write_record(["threshold", "left", "right", "ci_lo", "ci_hi"])?;
    for p in &curve.points {
        w.write_record([
            fmt(p.threshold),
            fmt(p.left),
            fmt(p.right),
            fmt(p.right_ci.0),
            fmt(p.right_ci.1),
        ])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("tailcurve_ci.csv"))?;
    w.write_record([
        "threshold",
        "left",
        "left_ci_lo",
        "left_ci_hi",
        "left_count",
        "right",
        "right_ci_lo",
        "right_ci_hi",
        "right_count",
    ])?;
    for p in &curve.points {
        w.write_record([
            fmt(p.threshold),
            fmt(p.left),
            fmt(p.left_ci.0),
            fmt(p.left_ci.1),
            p.left_count.to_string(),
            fmt(p.right),
            fmt(p.right_ci.0),
            fmt(p.right_ci.1),
            p.right_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `ρ(θ)` grid with columns `theta, rho, p_mm, p_mp, p_pm, p_pp`.
pub fn write_rho_grid(path: &Path, rows: &[crate::report::RhoPoint]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["theta", "rho", "p_mm", "p_mp", "p_pm", "p_pp"])?;
    for r in rows {
        w.write_record([
            fmt(r.theta),
            opt(r.rho),
            opt(r.p[0][0]),
            opt(r.p[0][1]),
            opt(r.p[1][0]),
            opt(r.p[1][1]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Verification ledger with columns `check, status, required, measured, target, tolerance`.
pub fn write_checks(path: &Path, checks: &[crate::report::Check]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "check",
        "status",
        "required",
        "measured",
        "target",
        "tolerance",
    ])?;
    for c in checks {
        w.write_record([
            c.name.clone(),
            c.status.to_string(),
            c.required.to_string(),
            opt(c.measured),
            opt(c.target),
            c.tolerance.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}
