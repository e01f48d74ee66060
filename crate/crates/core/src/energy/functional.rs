use crate::elliptic::{solve_poisson, PoissonSolution};
use crate::energy::EntropyDensity;
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::RadialGrid;
use crate::params::ModelParams;

/// `L_δ = ∫ b_δ(u) + ½∫|∇φ|² - ∫uφ`, split into its three terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub entropy: f64,
    pub dirichlet: f64,
    pub coupling: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(entropy: f64, dirichlet: f64, coupling: f64) -> Self {
        Self {
            entropy,
            dirichlet,
            coupling,
            total: entropy + dirichlet + coupling,
        }
    }
}

/// Liapunov functional of `u` with its potential `phi`. The potential is
/// checked against a fresh Poisson solve of `u`.
pub fn liapunov(
    u: &CellField,
    phi: &PoissonSolution,
    params: &ModelParams,
    grid: &RadialGrid,
) -> Result<EnergyBreakdown> {
    let fresh = solve_poisson(u, grid)?;
    let scale = fresh.face_gradient.iter().fold(1e-300f64, |a, g| a.max(g.abs()));
    let mismatch = phi.face_gradient.len() != fresh.face_gradient.len()
        || phi
            .face_gradient
            .iter()
            .zip(&fresh.face_gradient)
            .any(|(a, b)| (a - b).abs() > 1e-9 * scale);
    if mismatch {
        return Err(Error::Parameter(
            "potential is not the Poisson solution of the density".into(),
        ));
    }
    liapunov_with(u, phi, &EntropyDensity::new(params.delta, params.m)?, grid)
}

/// Liapunov functional without the consistency check.
pub fn liapunov_with(
    u: &CellField,
    phi: &PoissonSolution,
    entropy: &EntropyDensity,
    grid: &RadialGrid,
) -> Result<EnergyBreakdown> {
    grid.check_len(u.len())?;
    grid.check_len(phi.phi.len())?;
    let volumes = grid.volumes();
    let ent: f64 = volumes.iter().zip(u.values()).map(|(v, &x)| v * entropy.eval(x)).sum();
    let dirichlet = 0.5 * phi.dirichlet_energy(grid);
    let coupling: f64 = -volumes
        .iter()
        .zip(u.values())
        .zip(phi.phi.values())
        .map(|((v, x), p)| v * x * p)
        .sum::<f64>();
    Ok(EnergyBreakdown::new(ent, dirichlet, coupling))
}

/// Right-hand side of the coercivity estimate
/// `L_δ >= ω_M ‖u‖_m^m - (m/(m-1)) M |Ω|`.
pub fn coercivity_floor(omega: f64, lm_norm: f64, params: &ModelParams, volume: f64) -> f64 {
    let m = params.m;
    omega * lm_norm.powf(m) - m / (m - 1.0) * params.mass * volume
}
