//! Entropy density `b_δ(u) = ∫_1^u ∫_1^z m(σ+δ)^{m-1}/σ dσ dz`.
//!
//! The double integral is reduced to the single integral
//! `b_δ(u) = ∫_1^u (u - σ) m(σ+δ)^{m-1}/σ dσ` (repeated integration), whose
//! integrand is bounded on the whole range, including `u = 0` where it
//! becomes `m(σ+δ)^{m-1}`. It is evaluated by double-exponential quadrature,
//! which copes with the `σ^{m-1}` endpoint behaviour at `δ = 0`.

use crate::error::{Error, Result};

/// Absolute tolerance requested from the quadrature.
pub const B_DELTA_TOLERANCE: f64 = 1e-11;

fn check(u: f64, delta: f64, m: f64) -> Result<()> {
    if !(u.is_finite() && u >= 0.0) {
        return Err(Error::Parameter(format!("b_delta needs u >= 0, got {u}")));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::Parameter(format!("b_delta needs delta >= 0, got {delta}")));
    }
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::Parameter(format!("b_delta needs m > 1, got {m}")));
    }
    Ok(())
}

/// `b_δ(u)` by adaptive quadrature; `b_δ(1) = b_δ'(1) = 0` and `b_δ >= 0`.
pub fn b_delta(u: f64, delta: f64, m: f64) -> Result<f64> {
    check(u, delta, m)?;
    Ok(b_delta_quadrature(u, delta, m))
}

fn b_delta_quadrature(u: f64, delta: f64, m: f64) -> f64 {
    use quadrature::double_exponential::integrate;

    if u == 1.0 {
        return 0.0;
    }
    let kernel = move |s: f64| m * (s + delta).powf(m - 1.0);
    let value = if u == 0.0 {
        integrate(kernel, 0.0, 1.0, B_DELTA_TOLERANCE).integral
    } else if u > 1.0 {
        integrate(|s| (u - s) / s * kernel(s), 1.0, u, B_DELTA_TOLERANCE).integral
    } else {
        integrate(|s| (s - u) / s * kernel(s), u, 1.0, B_DELTA_TOLERANCE).integral
    };
    value.max(0.0)
}

/// `b_0(u) = u^m/(m-1) - m u/(m-1) + 1`, the exact entropy at `δ = 0`.
pub fn b_zero_closed_form(u: f64, m: f64) -> f64 {
    (u.powf(m) - m * u) / (m - 1.0) + 1.0
}

/// Lower bound `u^m/(m-1) - m u/(m-1) + 1`, attained at `δ = 0`.
pub fn b_delta_lower_bound(u: f64, m: f64) -> f64 {
    b_zero_closed_form(u, m)
}

/// Upper bound `m(u ln u - u + 1) + (m/(m-1))(u^m/m - u + 1)`, from
/// `(σ+δ)^{m-1} <= 1 + σ^{m-1}` for `δ < 1`.
pub fn b_delta_upper_bound(u: f64, m: f64) -> f64 {
    let ulnu = if u == 0.0 { 0.0 } else { u * u.ln() };
    m * (ulnu - u + 1.0) + m / (m - 1.0) * (u.powf(m) / m - u + 1.0)
}

/// Cell-wise evaluator for a fixed `(δ, m)`; uses the closed form at
/// `δ = 0` and quadrature otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyDensity {
    delta: f64,
    m: f64,
}

impl EntropyDensity {
    pub fn new(delta: f64, m: f64) -> Result<Self> {
        check(1.0, delta, m)?;
        Ok(Self { delta, m })
    }

    pub fn eval(&self, u: f64) -> f64 {
        if self.delta == 0.0 {
            b_zero_closed_form(u, self.m).max(0.0)
        } else {
            b_delta_quadrature(u, self.delta, self.m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization_point() {
        for delta in [0.0, 1e-3, 0.5, 0.99] {
            assert_eq!(b_delta(1.0, delta, 4.0 / 3.0).unwrap(), 0.0);
            // b'(1) = 0: symmetric difference quotient
            let h = 1e-4;
            let d = (b_delta(1.0 + h, delta, 1.5).unwrap() - b_delta(1.0 - h, delta, 1.5).unwrap()) / (2.0 * h);
            assert!(d.abs() < 1e-7, "b'(1) = {d}");
        }
    }

    #[test]
    fn closed_form_at_zero_delta() {
        // 8^{4/3}·3 - (4/3)·8·3 + 1 = 48 - 32 + 1
        let b = b_delta(8.0, 0.0, 4.0 / 3.0).unwrap();
        assert!((b - 17.0).abs() < 1e-10, "{b}");
        assert!((b_zero_closed_form(8.0, 4.0 / 3.0) - 17.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_closed_form_on_grid() {
        for m in [4.0 / 3.0, 1.5, 1.6] {
            for k in 0..=400 {
                let u = k as f64 * 0.25;
                let q = b_delta(u, 0.0, m).unwrap();
                let c = b_zero_closed_form(u, m);
                assert!((q - c).abs() <= 1e-9, "m={m} u={u}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn second_derivative_matches_integrand() {
        // b'' = m(u+δ)^{m-1}/u
        let (delta, m, u, h) = (0.3, 4.0 / 3.0, 2.5, 1e-3);
        let f = |x: f64| b_delta(x, delta, m).unwrap();
        let second = (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
        let expected = m * (u + delta).powf(m - 1.0) / u;
        assert!((second - expected).abs() < 1e-4 * expected);
    }

    #[test]
    fn rejects_invalid() {
        assert!(b_delta(-1.0, 0.0, 1.5).is_err());
        assert!(b_delta(1.0, 0.0, 1.0).is_err());
        assert!(b_delta(1.0, -0.1, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_delta(u in 0.0..100.0f64, d1 in 0.0..0.99f64, d2 in 0.0..0.99f64) {
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            let m = 4.0 / 3.0;
            let a = b_delta(u, lo, m).unwrap();
            let b = b_delta(u, hi, m).unwrap();
            prop_assert!(a <= b + 1e-9);
            prop_assert!(a >= 0.0);
        }
    }
}
