//! Radial finite-volume toolkit for the parabolic-elliptic Keller-Segel
//! system with critical degenerate diffusion `m = 2(N-1)/N` on a ball in
//! `R^N`, `N >= 3`.
//!
//! The density equation is advanced in its δ-regularized form
//! `∂_t u = div(∇(u+δ)^m - u∇φ)`, `-Δφ = u - <u>`, with no-flux boundary
//! conditions. Around the solver sit the variational quantities (entropy
//! density, Liapunov functional, critical mass), diagnostics for blow-up and
//! uniqueness, and an experiment harness with a CLI.

pub mod analysis;
pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod params;

pub use diagnostics::DiagnosticsRecord;
pub use error::{Error, Result};
pub use field::{lp_norm, volume_integral, CellField, PotentialField};
pub use grid::{make_uniform_grid, RadialGrid};
pub use params::{critical_exponent, ModelParams};
