//! Diagnostics built on top of the solver: blow-up detection, the
//! `H¹`-dual distance with its Gronwall-type growth check, interpolation
//! exponents, and audits of the functional inequalities behind the `L^p`
//! estimates.

pub mod audit;
pub mod blowup;
pub mod dual;
pub mod exponents;

pub use audit::{
    audit_gn, audit_poincare, calibrate_gn, calibrate_poincare, h1_norm, smooth_corpus, write_audit_csv,
    InequalityAuditRecord,
};
pub use blowup::{blowup_detector, BlowupConfig, BlowupMonitor, BlowupReason, BlowupVerdict};
pub use dual::{dual_distance, gronwall_check, GronwallConfig, GronwallReport, GrowthFit, Snapshot};
pub use exponents::{app_theta, gn_theta};
