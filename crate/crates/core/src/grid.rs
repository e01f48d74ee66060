//! Radial geometry of the ball `B_R ⊂ R^N` and the midpoint quadrature
//! primitives every other module integrates with.
//!
//! Cells are spherical shells `r_{i-1/2} < r < r_{i+1/2}`. Cell volumes and
//! face areas are exact for the shells, so sums of cell volumes telescope to
//! the measure of the ball.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::check_dimension;

/// Surface measure of the unit sphere `S^{N-1}`, i.e. `2 π^{N/2} / Γ(N/2)`.
pub fn unit_sphere_area(dimension: usize) -> f64 {
    2.0 * PI.powf(dimension as f64 / 2.0) / gamma_half_integer(dimension)
}

/// `Γ(k/2)` for a positive integer `k`, by the recurrence `Γ(x+1) = xΓ(x)`.
fn gamma_half_integer(k: usize) -> f64 {
    let (mut x, mut g) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// Measure of the ball of radius `radius` in `R^N`.
pub fn ball_volume(dimension: usize, radius: f64) -> f64 {
    unit_sphere_area(dimension) * radius.powi(dimension as i32) / dimension as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dimension: usize,
    radius: f64,
    edges: Vec<f64>,
    centers: Vec<f64>,
    volumes: Vec<f64>,
    face_areas: Vec<f64>,
    /// Distance between the centers adjacent to each face; zero on the two
    /// boundary faces, which carry no flux.
    face_spacing: Vec<f64>,
    total_volume: f64,
}

/// Uniform radial grid with `cells` shells of width `radius / cells`.
pub fn make_uniform_grid(dimension: usize, radius: f64, cells: usize) -> Result<RadialGrid> {
    RadialGrid::uniform(dimension, radius, cells)
}

impl RadialGrid {
    pub fn uniform(dimension: usize, radius: f64, cells: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Grid(format!("radius must be positive, got {radius}")));
        }
        if cells < 3 {
            return Err(Error::Grid(format!("need at least 3 cells, got {cells}")));
        }
        let dr = radius / cells as f64;
        let mut edges: Vec<f64> = (0..=cells).map(|k| k as f64 * dr).collect();
        edges[cells] = radius;
        Self::from_edges(dimension, edges)
    }

    /// Grid from arbitrary edges `0 = r_{1/2} < ... < r_{n+1/2} = R`.
    pub fn from_edges(dimension: usize, edges: Vec<f64>) -> Result<Self> {
        check_dimension(dimension)?;
        if edges.len() < 4 {
            return Err(Error::Grid(format!(
                "need at least 3 cells, got {}",
                edges.len().saturating_sub(1)
            )));
        }
        if edges[0] != 0.0 {
            return Err(Error::Grid("first edge must be exactly 0".into()));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("edges must be finite and strictly increasing".into()));
        }

        let n = edges.len() - 1;
        let radius = edges[n];
        let omega = unit_sphere_area(dimension);
        let nd = dimension as f64;
        let powered: Vec<f64> = edges.iter().map(|r| r.powi(dimension as i32)).collect();

        let volumes: Vec<f64> = powered.windows(2).map(|w| omega * (w[1] - w[0]) / nd).collect();
        let face_areas: Vec<f64> = edges.iter().map(|r| omega * r.powi(dimension as i32 - 1)).collect();
        let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mut face_spacing = vec![0.0; n + 1];
        for f in 1..n {
            face_spacing[f] = centers[f] - centers[f - 1];
        }
        let total_volume = volumes.iter().sum();

        Ok(Self {
            dimension,
            radius,
            edges,
            centers,
            volumes,
            face_areas,
            face_spacing,
            total_volume,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cell_count(&self) -> usize {
        self.volumes.len()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Areas of the `n + 1` faces; the face at `r = 0` has area exactly 0.
    pub fn face_areas(&self) -> &[f64] {
        &self.face_areas
    }

    pub fn face_spacing(&self) -> &[f64] {
        &self.face_spacing
    }

    /// Discrete measure `Σ V_i`.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Exact measure of the ball, `ω_{N-1} R^N / N`.
    pub fn domain_volume(&self) -> f64 {
        ball_volume(self.dimension, self.radius)
    }

    /// Smallest cell width; the CFL bounds are stated in terms of it.
    pub fn min_width(&self) -> f64 {
        self.edges.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.cell_count() {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                field: len,
                grid: self.cell_count(),
            })
        }
    }

    /// `Σ_i V_i f_i`.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(self.volumes.iter().zip(values).map(|(v, f)| v * f).sum())
    }

    /// Volume average `Σ V_i f_i / Σ V_i`.
    pub fn mean(&self, values: &[f64]) -> Result<f64> {
        Ok(self.integrate(values)? / self.total_volume)
    }

    /// `Σ_i V_i |f_i|^p` for any `p > 0`; the quasi-norms with `p < 1`
    /// appear in the interpolation audits.
    pub fn power_sum(&self, values: &[f64], p: f64) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(self.volumes.iter().zip(values).map(|(v, f)| v * f.abs().powf(p)).sum())
    }

    /// `(Σ V_i |f_i|^p)^{1/p}` for `p > 0`, or the maximum modulus for `p = ∞`.
    pub fn quasi_norm(&self, values: &[f64], p: f64) -> Result<f64> {
        if p.is_infinite() && p > 0.0 {
            self.check_len(values.len())?;
            return Ok(values.iter().fold(0.0, |acc, f| acc.max(f.abs())));
        }
        if !(p > 0.0) {
            return Err(Error::Parameter(format!("exponent must be positive, got {p}")));
        }
        Ok(self.power_sum(values, p)?.powf(1.0 / p))
    }

    /// Discrete `L^p` norm, `p >= 1` or `p = ∞`.
    pub fn lp_norm(&self, values: &[f64], p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::Parameter(format!("L^p norm needs p >= 1, got {p}")));
        }
        self.quasi_norm(values, p)
    }

    /// Squared discrete gradient seminorm `Σ_f A_f h_f g_f²` with the face
    /// gradient `g_f = (f_{i+1} - f_i) / h_f`.
    pub fn gradient_energy(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values.len())?;
        let n = self.cell_count();
        Ok((1..n)
            .map(|f| {
                let h = self.face_spacing[f];
                let g = (values[f] - values[f - 1]) / h;
                self.face_areas[f] * h * g * g
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn four_cell_ball() {
        let g = make_uniform_grid(3, 1.0, 4).unwrap();
        assert_eq!(g.edges(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let vol = 4.0 * PI / 3.0;
        assert!((g.total_volume() - vol).abs() <= 1e-12 * vol);
        assert_eq!(g.face_areas()[0], 0.0);
    }

    #[test]
    fn first_cell_volume() {
        let g = make_uniform_grid(3, 1.0, 100).unwrap();
        let expected = 4.0 * PI / 3.0 * 0.01f64.powi(3);
        assert!((g.volumes()[0] - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(make_uniform_grid(2, 1.0, 10), Err(Error::Dimension(2))));
        assert!(make_uniform_grid(3, 1.0, 2).is_err());
        assert!(make_uniform_grid(3, 0.0, 10).is_err());
        assert!(RadialGrid::from_edges(3, vec![0.1, 0.2, 0.3, 0.4]).is_err());
        assert!(RadialGrid::from_edges(3, vec![0.0, 0.2, 0.2, 0.4]).is_err());
    }

    #[test]
    fn integrals_and_norms() {
        let g = make_uniform_grid(3, 1.0, 4).unwrap();
        let vol = 4.0 * PI / 3.0;
        assert!((g.integrate(&[1.0; 4]).unwrap() - vol).abs() < 1e-12);
        assert_eq!(g.integrate(&[0.0; 4]).unwrap(), 0.0);
        let first = g.integrate(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((first - vol / 64.0).abs() < 1e-15);

        let c = 2.5;
        for p in [1.0, 1.5, 2.0, 7.0] {
            let norm = g.lp_norm(&[c; 4], p).unwrap();
            assert!((norm - c * vol.powf(1.0 / p)).abs() < 1e-12);
        }
        assert_eq!(g.lp_norm(&[0.5, -3.0, 2.0, 1.0], f64::INFINITY).unwrap(), 3.0);
        assert!(g.lp_norm(&[1.0; 4], 0.5).is_err());
        assert!(g.integrate(&[1.0; 3]).is_err());
    }

    #[test]
    fn general_edges_keep_closure() {
        let edges = vec![0.0, 0.1, 0.15, 0.5, 0.9, 2.0];
        let g = RadialGrid::from_edges(4, edges).unwrap();
        let exact = ball_volume(4, 2.0);
        assert!((g.total_volume() - exact).abs() <= 1e-12 * exact);
        assert!((g.face_spacing()[2] - (0.325 - 0.125)).abs() < 1e-15);
    }
}
