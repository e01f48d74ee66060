use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dynamics::Termination;
use crate::error::{Error, Result};

use super::config::RunConfig;
use super::experiment::{format_value, resolve_sobolev, run_experiment_with, SobolevSource};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mass: f64,
    /// `M / M̂*` for the threshold of the resolved Sobolev constant.
    pub mass_ratio: f64,
    pub verdict: Termination,
    pub max_linf: f64,
    pub final_liapunov: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub sobolev: SobolevSource,
    pub rows: Vec<SweepRow>,
    pub summary_path: PathBuf,
}

/// Runs the template at every mean density in `masses` and writes
/// `summary.csv` into the template's output directory. Member `k` writes
/// its artifacts to `mass_<k>/`. Rows keep the input order.
pub fn sweep_mass(template: &RunConfig, masses: &[f64]) -> Result<SweepSummary> {
    sweep_mass_with(template, masses, true)
}

/// [`sweep_mass`] with the worker pool switched on or off.
pub fn sweep_mass_with(template: &RunConfig, masses: &[f64], parallel: bool) -> Result<SweepSummary> {
    if masses.is_empty() {
        return Err(Error::Parameter("mass sweep needs at least one mass".into()));
    }
    template.validate()?;
    let sobolev = resolve_sobolev(template)?;
    let root = template.output_dir();
    let member = |(k, &mass): (usize, &f64)| -> Result<SweepRow> {
        let mut cfg = template.clone();
        cfg.physics.mass = mass;
        cfg.output.directory = Some(root.join(format!("mass_{k}")));
        let out = run_experiment_with(&cfg, sobolev)?;
        Ok(SweepRow {
            mass,
            mass_ratio: mass / out.threshold.m_star,
            verdict: out.run.cause,
            max_linf: out.max_linf(),
            final_liapunov: out.final_liapunov(),
        })
    };
    let rows: Vec<SweepRow> = if parallel {
        masses.par_iter().enumerate().map(member).collect::<Result<_>>()?
    } else {
        masses.iter().enumerate().map(member).collect::<Result<_>>()?
    };
    let summary_path = root.join("summary.csv");
    write_summary(&rows, &summary_path)?;
    Ok(SweepSummary {
        sobolev,
        rows,
        summary_path,
    })
}

fn write_summary(rows: &[SweepRow], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["mass", "mass_ratio", "verdict", "max_linf", "final_liapunov"])?;
    for r in rows {
        w.write_record([
            format_value(r.mass),
            format_value(r.mass_ratio),
            r.verdict.to_string(),
            format_value(r.max_linf),
            format_value(r.final_liapunov),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
