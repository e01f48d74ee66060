//! Variational quantities of the regularized system: entropy density,
//! Liapunov functional, critical mass and a radial Sobolev-constant
//! estimator.

mod entropy;
mod functional;
mod sobolev;
mod threshold;

pub use entropy::{
    b_delta, b_delta_lower_bound, b_delta_upper_bound, b_zero_closed_form, EntropyDensity, B_DELTA_TOLERANCE,
};
pub use functional::{coercivity_floor, liapunov, liapunov_with, EnergyBreakdown};
pub use sobolev::{estimate_sobolev_constant, rayleigh_quotient, sobolev_exponent, SobolevEstimate, SobolevEstimator};
pub use threshold::{m_star, omega_m, threshold_report, CsProvenance, ThresholdReport};
