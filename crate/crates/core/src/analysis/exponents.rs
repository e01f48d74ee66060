use crate::error::{Error, Result};
use crate::params::check_dimension;

/// Gagliardo-Nirenberg exponent
/// `θ = 2N(q₂ - q₁) / (q₂[(N+2)q₁ + 2N(1 - q₁)])` for `0 < q₁ <= q₂ <= 2N/(N-2)`.
pub fn gn_theta(q1: f64, q2: f64, dimension: usize) -> Result<f64> {
    check_dimension(dimension)?;
    let n = dimension as f64;
    let critical = 2.0 * n / (n - 2.0);
    if !(q1 > 0.0 && q1 <= q2 && q2 <= critical) {
        return Err(Error::Parameter(format!(
            "need 0 < q1 <= q2 <= {critical}, got q1 = {q1}, q2 = {q2}"
        )));
    }
    let theta = 2.0 * n * (q2 - q1) / (q2 * ((n + 2.0) * q1 + 2.0 * n * (1.0 - q1)));
    if !(0.0..=1.0 + 1e-15).contains(&theta) {
        return Err(Error::Formula(format!("GN exponent {theta} outside [0, 1]")));
    }
    Ok(theta.min(1.0))
}

/// Interpolation exponent of the Moser bootstrap,
/// `θ = 3N(r+m-1) / ((3N+2)r + 4N(m-1))`, valid for `r >= 4`. Also checks
/// the bound `θ <= 3N/(3N+2)`.
pub fn app_theta(r: f64, m: f64, dimension: usize) -> Result<f64> {
    check_dimension(dimension)?;
    if !(r >= 4.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("need r >= 4, got {r}")));
    }
    if !(m > 1.0) {
        return Err(Error::Parameter(format!("need m > 1, got {m}")));
    }
    let n = dimension as f64;
    let theta = 3.0 * n * (r + m - 1.0) / ((3.0 * n + 2.0) * r + 4.0 * n * (m - 1.0));
    let bound = 3.0 * n / (3.0 * n + 2.0);
    if !(theta > 0.0 && theta < 1.0) || theta > bound * (1.0 + 1e-15) {
        return Err(Error::Formula(format!(
            "interpolation exponent {theta} violates (0, 1) or the bound {bound}"
        )));
    }
    Ok(theta)
}
