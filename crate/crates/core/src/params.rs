use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn check_dimension(dimension: usize) -> Result<()> {
    if dimension >= 3 {
        Ok(())
    } else {
        Err(Error::Dimension(dimension))
    }
}

/// Critical diffusion exponent `m = 2(N-1)/N`.
pub fn critical_exponent(dimension: usize) -> Result<f64> {
    check_dimension(dimension)?;
    let n = dimension as f64;
    Ok(2.0 * (n - 1.0) / n)
}

/// Cube root by a bit-level first guess and three Halley steps, accurate to
/// about one ulp for normal inputs; everything else goes to `f64::cbrt`.
#[inline]
pub fn fast_cbrt(x: f64) -> f64 {
    if !(x >= f64::MIN_POSITIVE && x < f64::MAX) {
        return x.cbrt();
    }
    let mut y = f64::from_bits(x.to_bits() / 3 + 0x2A9F_7893_782D_A1CE);
    for _ in 0..3 {
        let y3 = y * y * y;
        y *= (y3 + 2.0 * x) / (2.0 * y3 + x);
    }
    y
}

/// Physical parameters of the regularized system: the diffusion law
/// `(u + δ)^m` and the mean density `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub dimension: usize,
    pub m: f64,
    pub delta: f64,
    pub mass: f64,
}

impl ModelParams {
    /// Parameters at the critical exponent for `dimension`.
    pub fn new(dimension: usize, delta: f64, mass: f64) -> Result<Self> {
        let m = critical_exponent(dimension)?;
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::Parameter(format!("delta must lie in [0, 1), got {delta}")));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::Parameter(format!("mass must be nonnegative, got {mass}")));
        }
        Ok(Self {
            dimension,
            m,
            delta,
            mass,
        })
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.dimension, delta, self.mass)
    }

    /// `(u + δ)^{m-1}`. The critical exponents 4/3 and 3/2 of N = 3, 4 are
    /// evaluated with `cbrt`/`sqrt`, which the time loop spends most of its
    /// time in.
    #[inline]
    pub fn power_coefficient(&self, u: f64) -> f64 {
        let x = u + self.delta;
        match self.dimension {
            3 => fast_cbrt(x),
            4 => x.sqrt(),
            _ => x.powf(self.m - 1.0),
        }
    }

    /// Pressure `(u + δ)^m`.
    #[inline]
    pub fn pressure(&self, u: f64) -> f64 {
        (u + self.delta) * self.power_coefficient(u)
    }

    /// Frozen-coefficient diffusivity `m (u + δ)^{m-1}`.
    #[inline]
    pub fn diffusivity(&self, u: f64) -> f64 {
        self.m * self.power_coefficient(u)
    }
}
