//! Calibrate-then-freeze audits of the interpolation inequalities.
//!
//! The inequalities hold with unknown constants, so each audit takes a
//! constant calibrated once as the largest raw ratio over a reference
//! corpus. A later sample fails only when it beats that constant by more
//! than [`AUDIT_SLACK`].

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

use super::exponents::gn_theta;

/// Relative slack in `lhs <= rhs (1 + slack)`.
pub const AUDIT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityAuditRecord {
    pub id: String,
    pub theta: Option<f64>,
    pub lhs: f64,
    /// Right side including the audited constant.
    pub rhs: f64,
    /// `lhs / rhs`, zero when both vanish.
    pub ratio: f64,
    pub pass: bool,
}

impl InequalityAuditRecord {
    fn new(id: String, theta: Option<f64>, lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Self {
            id,
            theta,
            lhs,
            rhs,
            ratio,
            pass: lhs <= rhs * (1.0 + AUDIT_SLACK),
        }
    }
}

/// `(‖u‖₂² + ‖∇u‖₂²)^{1/2}` with the face-gradient quadrature.
pub fn h1_norm(values: &[f64], grid: &RadialGrid) -> Result<f64> {
    Ok((grid.power_sum(values, 2.0)? + grid.gradient_energy(values)?).sqrt())
}

/// Raw Gagliardo-Nirenberg ratio `‖u‖_{q₂} / (‖u‖_{H¹}^θ ‖u‖_{q₁}^{1-θ})`.
fn gn_ratio(values: &[f64], q1: f64, q2: f64, theta: f64, grid: &RadialGrid) -> Result<(f64, f64)> {
    let lhs = grid.quasi_norm(values, q2)?;
    let base = h1_norm(values, grid)?.powf(theta) * grid.quasi_norm(values, q1)?.powf(1.0 - theta);
    Ok((lhs, base))
}

/// Raw Poincaré ratio `‖u‖²_{H¹} / (‖∇u‖₂² + ‖u‖_{q₁}²)`.
fn poincare_parts(values: &[f64], q1: f64, grid: &RadialGrid) -> Result<(f64, f64)> {
    let grad = grid.gradient_energy(values)?;
    let lhs = grid.power_sum(values, 2.0)? + grad;
    let base = grad + grid.quasi_norm(values, q1)?.powi(2);
    Ok((lhs, base))
}

fn check_q1_poincare(q1: f64) -> Result<()> {
    if q1 > 0.0 && q1 <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("Poincaré audit needs 0 < q1 <= 1, got {q1}")))
    }
}

fn max_ratio(parts: Vec<(f64, f64)>) -> Result<f64> {
    let c = parts
        .into_iter()
        .filter(|(lhs, _)| *lhs > 0.0)
        .map(|(lhs, base)| lhs / base)
        .fold(0.0, f64::max);
    if c > 0.0 && c.is_finite() {
        Ok(c)
    } else {
        Err(Error::Degenerate("calibration corpus has no nonzero field".into()))
    }
}

/// Largest GN ratio over `corpus`; this is the audited `C₁^θ`.
pub fn calibrate_gn(corpus: &[Vec<f64>], q1: f64, q2: f64, grid: &RadialGrid) -> Result<f64> {
    let theta = gn_theta(q1, q2, grid.dimension())?;
    let parts = corpus
        .par_iter()
        .map(|f| gn_ratio(f, q1, q2, theta, grid))
        .collect::<Result<Vec<_>>>()?;
    max_ratio(parts)
}

/// Largest Poincaré ratio over `corpus`; this is the audited `C₂(q₁)`.
pub fn calibrate_poincare(corpus: &[Vec<f64>], q1: f64, grid: &RadialGrid) -> Result<f64> {
    check_q1_poincare(q1)?;
    let parts = corpus
        .par_iter()
        .map(|f| poincare_parts(f, q1, grid))
        .collect::<Result<Vec<_>>>()?;
    max_ratio(parts)
}

/// Audits `‖u‖_{q₂} <= C ‖u‖_{H¹}^θ ‖u‖_{q₁}^{1-θ}` on every field, where
/// `constant` is the frozen `C₁^θ`.
pub fn audit_gn(
    fields: &[Vec<f64>],
    q1: f64,
    q2: f64,
    constant: f64,
    grid: &RadialGrid,
) -> Result<Vec<InequalityAuditRecord>> {
    let theta = gn_theta(q1, q2, grid.dimension())?;
    fields
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            let (lhs, base) = gn_ratio(f, q1, q2, theta, grid)?;
            Ok(InequalityAuditRecord::new(
                format!("gn-{k}"),
                Some(theta),
                lhs,
                constant * base,
            ))
        })
        .collect()
}

/// Audits `‖u‖²_{H¹} <= C₂ (‖∇u‖₂² + ‖u‖_{q₁}²)` on every field.
pub fn audit_poincare(
    fields: &[Vec<f64>],
    q1: f64,
    constant: f64,
    grid: &RadialGrid,
) -> Result<Vec<InequalityAuditRecord>> {
    check_q1_poincare(q1)?;
    fields
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            let (lhs, base) = poincare_parts(f, q1, grid)?;
            Ok(InequalityAuditRecord::new(
                format!("poincare-{k}"),
                None,
                lhs,
                constant * base,
            ))
        })
        .collect()
}

/// Deterministic corpus of nonnegative smooth radial fields: a background
/// plus one to three Gaussian shells of random height, width and center.
/// Field `k` draws from stream `k` of the seed, so the corpus does not
/// depend on the thread count.
pub fn smooth_corpus(grid: &RadialGrid, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let radius = grid.radius();
    (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let background = rng.gen_range(0.0..1.0);
            let shells: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=3))
                .map(|_| {
                    (
                        rng.gen_range(0.1..10.0),
                        radius * rng.gen_range(0.03..0.5),
                        radius * rng.gen_range(0.0..0.8),
                    )
                })
                .collect();
            grid.centers()
                .iter()
                .map(|&r| {
                    background
                        + shells
                            .iter()
                            .map(|(h, w, c)| h * (-(r - c).powi(2) / (2.0 * w * w)).exp())
                            .sum::<f64>()
                })
                .collect()
        })
        .collect()
}

/// Writes one CSV row per record: `id, theta, lhs, rhs, ratio, pass`.
pub fn write_audit_csv(records: &[InequalityAuditRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(["id", "theta", "lhs", "rhs", "ratio", "pass"])?;
    for r in records {
        let theta = r.theta.map_or(String::new(), |t| format!("{t:.16e}"));
        w.write_record([
            r.id.clone(),
            theta,
            format!("{:.16e}", r.lhs),
            format!("{:.16e}", r.rhs),
            format!("{:.16e}", r.ratio),
            r.pass.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
