use serde::{Deserialize, Serialize};

use crate::elliptic::{grad_linf, PoissonSolution};
use crate::energy::{liapunov_with, EntropyDensity};
use crate::error::Result;
use crate::field::CellField;
use crate::grid::RadialGrid;
use crate::params::ModelParams;

/// Column order of `series.csv`.
pub const SERIES_HEADER: [&str; 13] = [
    "t",
    "dt",
    "mass",
    "l1",
    "lm",
    "l2",
    "linf",
    "liapunov",
    "entropy",
    "dirichlet",
    "coupling",
    "min_u",
    "phi_grad_linf",
];

/// One time sample of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub l1: f64,
    pub lm: f64,
    pub l2: f64,
    pub linf: f64,
    pub liapunov: f64,
    pub entropy: f64,
    pub dirichlet: f64,
    pub coupling: f64,
    pub min_u: f64,
    pub phi_grad_linf: f64,
}

impl DiagnosticsRecord {
    pub fn compute(
        t: f64,
        dt: f64,
        u: &CellField,
        poisson: &PoissonSolution,
        params: &ModelParams,
        entropy: &EntropyDensity,
        grid: &RadialGrid,
    ) -> Result<Self> {
        let values = u.values();
        let energy = liapunov_with(u, poisson, entropy, grid)?;
        Ok(Self {
            t,
            dt,
            mass: grid.integrate(values)?,
            l1: grid.lp_norm(values, 1.0)?,
            lm: grid.lp_norm(values, params.m)?,
            l2: grid.lp_norm(values, 2.0)?,
            linf: grid.lp_norm(values, f64::INFINITY)?,
            liapunov: energy.total,
            entropy: energy.entropy,
            dirichlet: energy.dirichlet,
            coupling: energy.coupling,
            min_u: u.min(),
            phi_grad_linf: grad_linf(poisson),
        })
    }

    pub fn to_row(&self) -> [f64; 13] {
        [
            self.t,
            self.dt,
            self.mass,
            self.l1,
            self.lm,
            self.l2,
            self.linf,
            self.liapunov,
            self.entropy,
            self.dirichlet,
            self.coupling,
            self.min_u,
            self.phi_grad_linf,
        ]
    }

    pub fn from_row(row: [f64; 13]) -> Self {
        let [t, dt, mass, l1, lm, l2, linf, liapunov, entropy, dirichlet, coupling, min_u, phi_grad_linf] = row;
        Self {
            t,
            dt,
            mass,
            l1,
            lm,
            l2,
            linf,
            liapunov,
            entropy,
            dirichlet,
            coupling,
            min_u,
            phi_grad_linf,
        }
    }
}
