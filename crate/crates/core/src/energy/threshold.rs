use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::critical_exponent;

/// Where the Sobolev constant behind a threshold came from. The two are
/// reported side by side and never substituted for each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum CsProvenance {
    UserSupplied,
    RadialEstimate {
        cells: usize,
        trials: usize,
        iterations: usize,
    },
}

impl std::fmt::Display for CsProvenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsProvenance::UserSupplied => f.write_str("user-supplied"),
            CsProvenance::RadialEstimate {
                cells,
                trials,
                iterations,
            } => write!(
                f,
                "radial Rayleigh-quotient estimate (cells={cells}, trials={trials}, iterations={iterations})"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub c_s: f64,
    pub provenance: CsProvenance,
    pub mass: f64,
    pub m_star: f64,
    pub omega: f64,
    pub subcritical: bool,
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive, got {value}")))
    }
}

/// Critical mean density `M* = (2 C_s² / ((m-1) |Ω|^{2/N}))^{N/2}`.
pub fn m_star(dimension: usize, volume: f64, c_s: f64) -> Result<f64> {
    let m = critical_exponent(dimension)?;
    positive("domain volume", volume)?;
    positive("Sobolev constant", c_s)?;
    let n = dimension as f64;
    Ok((2.0 * c_s * c_s / ((m - 1.0) * volume.powf(2.0 / n))).powf(n / 2.0))
}

/// Coercivity gap `ω_M = 1/(m-1) - (C_s^{-2}/2) M^{2/N} |Ω|^{2/N}`, checked
/// against the equivalent form `(|Ω|^{2/N} / 2C_s²)(M*^{2/N} - M^{2/N})`.
pub fn omega_m(mass: f64, dimension: usize, volume: f64, c_s: f64) -> Result<f64> {
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(Error::Parameter(format!("mass must be nonnegative, got {mass}")));
    }
    let star = m_star(dimension, volume, c_s)?;
    let m = critical_exponent(dimension)?;
    let e = 2.0 / dimension as f64;
    let pull = 0.5 * (mass * volume).powf(e) / (c_s * c_s);
    let direct = 1.0 / (m - 1.0) - pull;
    let factored = volume.powf(e) / (2.0 * c_s * c_s) * (star.powf(e) - mass.powf(e));
    let scale = 1.0 / (m - 1.0) + pull;
    if (direct - factored).abs() > 1e-12 * scale {
        return Err(Error::Formula(format!(
            "omega_M forms disagree: {direct:e} vs {factored:e}"
        )));
    }
    Ok(direct)
}

pub fn threshold_report(
    mass: f64,
    dimension: usize,
    volume: f64,
    c_s: f64,
    provenance: CsProvenance,
) -> Result<ThresholdReport> {
    let star = m_star(dimension, volume, c_s)?;
    let omega = omega_m(mass, dimension, volume, c_s)?;
    Ok(ThresholdReport {
        c_s,
        provenance,
        mass,
        m_star: star,
        omega,
        subcritical: omega > 0.0,
    })
}
