//! Neumann problem `-Δφ = u - <u>`, `<φ> = 0`, solved exactly in the radial
//! reduction.
//!
//! Integrating the equation over the ball of radius `r` gives the flux
//! balance `A(r) φ'(r) = -∫_{B_r} (u - M)`. The discrete solver evaluates the
//! right-hand side by cumulative sums of cell sources, so the face gradients
//! come out of a single O(n) pass and the outer face gradient vanishes
//! because `M` is computed from `u` itself. Cell values follow from
//! `φ_{i+1} - φ_i = h_f g_f`, then the constant is fixed by the volume mean.
//!
//! The resulting map is the exact inverse of the discrete operator
//! `(Lφ)_i = V_i^{-1} Σ_f A_f (φ_i - φ_nbr) / h_f` on zero-mean fields, which
//! makes the discrete integration by parts
//! `Σ_f A_f h_f g_f² = Σ_i V_i (u_i - M) φ_i` hold to round-off.

use crate::error::{Error, Result};
use crate::field::{CellField, PotentialField};
use crate::grid::RadialGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub phi: PotentialField,
    /// `dφ/dr` on the `n + 1` faces; both boundary entries are exactly 0.
    pub face_gradient: Vec<f64>,
    /// `|Σ V_i (u_i - M)|` before the outer gradient is pinned to zero.
    pub residual_mass: f64,
}

impl PoissonSolution {
    /// `Σ_f A_f h_f g_f²`, the discrete `‖∇φ‖₂²`.
    pub fn dirichlet_energy(&self, grid: &RadialGrid) -> f64 {
        self.face_gradient
            .iter()
            .zip(grid.face_areas())
            .zip(grid.face_spacing())
            .map(|((g, a), h)| a * h * g * g)
            .sum()
    }

    /// Largest entry of the discrete Hessian `D²φ` of a radial function,
    /// whose eigenvalues are `φ''` and `φ'/r`. Used as a proxy for the
    /// `W^{2,∞}` regularity of the potential.
    pub fn hessian_linf(&self, grid: &RadialGrid) -> f64 {
        let edges = grid.edges();
        let n = grid.cell_count();
        let mut max = 0.0f64;
        for i in 0..n {
            let second = (self.face_gradient[i + 1] - self.face_gradient[i]) / (edges[i + 1] - edges[i]);
            max = max.max(second.abs());
        }
        for f in 1..n {
            max = max.max((self.face_gradient[f] / edges[f]).abs());
        }
        max
    }
}

/// Volume mean `<u> = ∫u / |Ω|`.
pub fn mean_value(u: &CellField, grid: &RadialGrid) -> Result<f64> {
    grid.mean(u.values())
}

/// Solves `-Δφ = u - <u>` with homogeneous Neumann data and `<φ> = 0`.
pub fn solve_poisson(u: &CellField, grid: &RadialGrid) -> Result<PoissonSolution> {
    solve_source(u.values(), grid)
}

/// Same as [`solve_poisson`] for a signed source; the mean of `source` is
/// removed first.
pub fn solve_source(source: &[f64], grid: &RadialGrid) -> Result<PoissonSolution> {
    grid.check_len(source.len())?;
    if let Some(v) = source.iter().find(|v| !v.is_finite()) {
        return Err(Error::Field(format!("non-finite source value {v}")));
    }
    let n = grid.cell_count();
    let mut face_gradient = vec![0.0; n + 1];
    let (residual_mass, scale) = gradient_into(source, grid, &mut face_gradient);
    let limit = 1e-10 * scale;
    if residual_mass > limit && residual_mass > f64::MIN_POSITIVE {
        return Err(Error::Compatibility {
            residual: residual_mass,
            limit,
        });
    }

    let spacing = grid.face_spacing();
    let mut phi = vec![0.0; n];
    for f in 1..n {
        phi[f] = phi[f - 1] + spacing[f] * face_gradient[f];
    }
    let shift = grid.mean(&phi)?;
    phi.iter_mut().for_each(|p| *p -= shift);

    Ok(PoissonSolution {
        phi: PotentialField::from_gauged(phi),
        face_gradient,
        residual_mass,
    })
}

/// Face gradients of the solution for a length-checked, finite source,
/// written into `out` (length `n + 1`). Returns the compatibility residual
/// and the scale `Σ V |s|` it is judged against.
pub(crate) fn gradient_into(source: &[f64], grid: &RadialGrid, out: &mut [f64]) -> (f64, f64) {
    let n = grid.cell_count();
    let volumes = grid.volumes();
    let areas = grid.face_areas();
    let mut total = 0.0;
    let mut scale = 0.0;
    for (v, s) in volumes.iter().zip(source) {
        total += v * s;
        scale += v * s.abs();
    }
    let mean = total / grid.total_volume();
    out[0] = 0.0;
    out[n] = 0.0;
    let mut enclosed = 0.0;
    for f in 1..n {
        enclosed += volumes[f - 1] * (source[f - 1] - mean);
        out[f] = -enclosed / areas[f];
    }
    enclosed += volumes[n - 1] * (source[n - 1] - mean);
    (enclosed.abs(), scale)
}

/// `max_f |dφ/dr|`.
pub fn grad_linf(solution: &PoissonSolution) -> f64 {
    solution.face_gradient.iter().fold(0.0, |acc, g| acc.max(g.abs()))
}
