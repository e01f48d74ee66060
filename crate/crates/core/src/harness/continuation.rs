//! δ-continuation: the same initial density run at a halving ladder of
//! regularization parameters, compared at the final time.

use std::path::Path;

use rayon::prelude::*;

use crate::dynamics::{run, NullSink, Termination};
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::RadialGrid;

use super::config::RunConfig;
use super::experiment::format_value;

/// Default average decay factor a converging ladder must reach.
pub const DEFAULT_DECAY: f64 = 1.3;

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationReport {
    pub ladder: Vec<f64>,
    /// `‖u_{δ_k}(T) - u_{δ_{k+1}}(T)‖₂` for consecutive completed members.
    pub distances: Vec<f64>,
    /// Geometric mean of `d_k / d_{k+1}`; `None` with fewer than two distances.
    pub average_decay: Option<f64>,
    pub required_decay: f64,
    pub strictly_decreasing: bool,
    pub converged: bool,
    /// δ of the first member flagged as blowing up; the report then covers
    /// only the members before it.
    pub aborted_at: Option<f64>,
}

/// `δ₀, δ₀/2, ..., δ₀/2^{levels-1}`.
pub fn halving_ladder(delta0: f64, levels: usize) -> Result<Vec<f64>> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::Parameter(format!("delta0 must lie in (0, 1), got {delta0}")));
    }
    if levels < 2 {
        return Err(Error::Parameter(format!("need at least 2 levels, got {levels}")));
    }
    Ok((0..levels).map(|k| delta0 / 2f64.powi(k as i32)).collect())
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 2 {
        return Err(Error::Parameter("a ladder needs at least two levels".into()));
    }
    if ladder.iter().any(|d| !(*d >= 0.0 && *d < 1.0)) {
        return Err(Error::Parameter("ladder values must lie in [0, 1)".into()));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("ladder must decrease strictly".into()));
    }
    Ok(())
}

/// Discrete `‖u - v‖₂`.
pub fn l2_distance(u: &CellField, v: &CellField, grid: &RadialGrid) -> Result<f64> {
    grid.check_len(u.len())?;
    grid.check_len(v.len())?;
    let diff: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a - b).collect();
    grid.lp_norm(&diff, 2.0)
}

pub fn continuation_delta(template: &RunConfig, delta0: f64, levels: usize) -> Result<ContinuationReport> {
    continuation_ladder(template, &halving_ladder(delta0, levels)?, DEFAULT_DECAY)
}

/// Runs every ladder member concurrently and compares the final densities
/// of neighbours.
pub fn continuation_ladder(template: &RunConfig, ladder: &[f64], required_decay: f64) -> Result<ContinuationReport> {
    check_ladder(ladder)?;
    template.validate()?;
    let grid = template.grid()?;
    let u0 = template.initial_field(&grid)?;
    let schedule = template.run_schedule();
    let finals: Vec<(Termination, CellField)> = ladder
        .par_iter()
        .map(|&delta| {
            let params = template.params()?.with_delta(delta)?;
            let out = run(&u0, &params, &template.stepper, &grid, &schedule, &mut NullSink)?;
            Ok((out.cause, out.u))
        })
        .collect::<Result<_>>()?;

    let completed = finals
        .iter()
        .position(|(cause, _)| *cause == Termination::BlowupSuspected)
        .unwrap_or(finals.len());
    let aborted_at = (completed < finals.len()).then(|| ladder[completed]);
    let distances = finals[..completed]
        .windows(2)
        .map(|w| l2_distance(&w[0].1, &w[1].1, &grid))
        .collect::<Result<Vec<f64>>>()?;

    let strictly_decreasing = distances.len() >= 2 && distances.windows(2).all(|w| w[1] < w[0]);
    let average_decay = (distances.len() >= 2).then(|| {
        let (first, last) = (distances[0], distances[distances.len() - 1]);
        (first / last).powf(1.0 / (distances.len() - 1) as f64)
    });
    let converged = aborted_at.is_none() && strictly_decreasing && average_decay.map_or(false, |a| a >= required_decay);
    Ok(ContinuationReport {
        ladder: ladder.to_vec(),
        distances,
        average_decay,
        required_decay,
        strictly_decreasing,
        converged,
        aborted_at,
    })
}

/// Writes `continuation.csv` with one row per consecutive pair.
pub fn write_continuation_csv(report: &ContinuationReport, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["delta_coarse", "delta_fine", "l2_distance"])?;
    for (k, d) in report.distances.iter().enumerate() {
        w.write_record([
            format_value(report.ladder[k]),
            format_value(report.ladder[k + 1]),
            format_value(*d),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
