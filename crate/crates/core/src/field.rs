use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Nonnegative, finite cell-averaged density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CellField {
    values: Vec<f64>,
}

impl CellField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Field(format!("non-finite value {value} in cell {cell}")));
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeDensity { cell, value });
        }
        Ok(Self { values })
    }

    pub fn constant(value: f64, cells: usize) -> Result<Self> {
        Self::new(vec![value; cells])
    }

    /// Samples `profile(r)` at the cell centers.
    pub fn from_profile(grid: &RadialGrid, profile: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.centers().iter().map(|&r| profile(r)).collect())
    }

    pub(crate) fn from_trusted(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Multiplies every value by a nonnegative factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for CellField {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<CellField> for Vec<f64> {
    fn from(field: CellField) -> Self {
        field.values
    }
}

/// Chemoattractant potential, gauged to zero volume mean.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    values: Vec<f64>,
}

impl PotentialField {
    pub(crate) fn from_gauged(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Volume mean relative to the sup norm; zero up to round-off.
    pub fn gauge_defect(&self, grid: &RadialGrid) -> Result<f64> {
        let sup = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if sup == 0.0 {
            return Ok(0.0);
        }
        Ok(grid.mean(&self.values)?.abs() / sup)
    }
}

/// `∫ f dx` by midpoint quadrature.
pub fn volume_integral(field: &CellField, grid: &RadialGrid) -> Result<f64> {
    grid.integrate(field.values())
}

/// Discrete `L^p` norm, `p >= 1` or `p = f64::INFINITY`.
pub fn lp_norm(field: &CellField, p: f64, grid: &RadialGrid) -> Result<f64> {
    grid.lp_norm(field.values(), p)
}
