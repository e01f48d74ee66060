//! `H¹`-dual distance `‖∇ψ‖₂`, `-Δψ = u₁ - u₂`, and the exponential-growth
//! check on paired runs.

use crate::elliptic::solve_source;
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::RadialGrid;

/// Relative mass mismatch tolerated between the two arguments.
pub const MASS_TOLERANCE: f64 = 1e-9;

fn same_mass(a: f64, b: f64) -> bool {
    (a - b).abs() <= MASS_TOLERANCE * a.abs().max(b.abs())
}

/// Dual distance between two densities of equal mass. Uses the face
/// quadrature of the Dirichlet term, so `d(u, <u>)² = Σ A h g²` of `φ[u]`.
pub fn dual_distance(u1: &CellField, u2: &CellField, grid: &RadialGrid) -> Result<f64> {
    grid.check_len(u1.len())?;
    grid.check_len(u2.len())?;
    let m1 = grid.integrate(u1.values())?;
    let m2 = grid.integrate(u2.values())?;
    if !same_mass(m1, m2) {
        return Err(Error::MassMismatch(m1, m2));
    }
    let diff: Vec<f64> = u1.values().iter().zip(u2.values()).map(|(a, b)| a - b).collect();
    if diff.iter().all(|d| *d == 0.0) {
        return Ok(0.0);
    }
    Ok(solve_source(&diff, grid)?.dirichlet_energy(grid).sqrt())
}

/// A density sampled at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: CellField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallConfig {
    /// Growth rate `C` the log-distance slope must not exceed.
    pub max_slope: f64,
    /// Two samples are paired when their times agree to this tolerance.
    pub time_tolerance: f64,
}

impl Default for GronwallConfig {
    fn default() -> Self {
        Self {
            max_slope: 50.0,
            time_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GronwallReport {
    /// Every paired distance is exactly zero.
    ExactCoincidence {
        times: Vec<f64>,
    },
    Growth(GrowthFit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    /// Least-squares slope of `ln d(t)` against `t`.
    pub fitted_slope: f64,
    /// Largest `(ln d_{k+1} - ln d_k) / (t_{k+1} - t_k)`.
    pub max_forward_slope: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Pairs the two series by time, gates on equal masses, and fits the growth
/// rate of the dual distance. Pairs with distance exactly zero are left out
/// of the fit.
pub fn gronwall_check(
    run1: &[Snapshot],
    run2: &[Snapshot],
    grid: &RadialGrid,
    cfg: &GronwallConfig,
) -> Result<GronwallReport> {
    if run1.is_empty() || run2.is_empty() {
        return Err(Error::Parameter("gronwall check needs nonempty series".into()));
    }
    let mut times = Vec::new();
    let mut distances = Vec::new();
    let mut j = 0;
    for a in run1 {
        while j < run2.len() && run2[j].t < a.t - cfg.time_tolerance {
            j += 1;
        }
        if j == run2.len() {
            break;
        }
        if (run2[j].t - a.t).abs() <= cfg.time_tolerance {
            times.push(a.t);
            distances.push(dual_distance(&a.u, &run2[j].u, grid)?);
        }
    }
    if times.is_empty() {
        return Err(Error::Parameter("the two series share no sample time".into()));
    }
    if distances.iter().all(|d| *d == 0.0) {
        return Ok(GronwallReport::ExactCoincidence { times });
    }

    let (ts, logs): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&distances)
        .filter(|(_, d)| **d > 0.0)
        .map(|(t, d)| (*t, d.ln()))
        .unzip();
    let fitted_slope = least_squares_slope(&ts, &logs);
    let max_forward_slope = ts
        .windows(2)
        .zip(logs.windows(2))
        .filter(|(t, _)| t[1] > t[0])
        .map(|(t, l)| (l[1] - l[0]) / (t[1] - t[0]))
        .fold(f64::NEG_INFINITY, f64::max);
    let max_forward_slope = if max_forward_slope.is_finite() {
        max_forward_slope
    } else {
        0.0
    };
    Ok(GronwallReport::Growth(GrowthFit {
        pass: max_forward_slope <= cfg.max_slope && fitted_slope.is_finite(),
        times,
        distances,
        fitted_slope,
        max_forward_slope,
        bound: cfg.max_slope,
    }))
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
