use crate::analysis::audit::{
    audit_gn, audit_poincare, calibrate_gn, calibrate_poincare, smooth_corpus, write_audit_csv,
};
use crate::error::{Error, Result};

use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditSummary {
    pub fields: usize,
    pub gn_constant: f64,
    pub gn_calibrated: bool,
    pub gn_passed: usize,
    pub poincare_constant: f64,
    pub poincare_calibrated: bool,
    pub poincare_passed: usize,
}

impl AuditSummary {
    pub fn all_pass(&self) -> bool {
        self.gn_passed == self.fields && self.poincare_passed == self.fields
    }
}

/// Audits the seeded corpus of the config against its frozen constants,
/// calibrating any constant the config leaves out, and writes
/// `audit_gn.csv` and `audit_poincare.csv`.
pub fn run_audit(cfg: &RunConfig) -> Result<AuditSummary> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let a = &cfg.audit;
    let corpus = smooth_corpus(&grid, a.fields, cfg.seed);
    let (gn_constant, gn_calibrated) = match a.gn_constant {
        Some(c) => (c, false),
        None => (calibrate_gn(&corpus, a.gn_q1, a.gn_q2, &grid)?, true),
    };
    let (poincare_constant, poincare_calibrated) = match a.poincare_constant {
        Some(c) => (c, false),
        None => (calibrate_poincare(&corpus, a.poincare_q1, &grid)?, true),
    };
    let gn = audit_gn(&corpus, a.gn_q1, a.gn_q2, gn_constant, &grid)?;
    let poincare = audit_poincare(&corpus, a.poincare_q1, poincare_constant, &grid)?;

    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_audit_csv(&gn, &dir.join("audit_gn.csv"))?;
    write_audit_csv(&poincare, &dir.join("audit_poincare.csv"))?;
    Ok(AuditSummary {
        fields: a.fields,
        gn_constant,
        gn_calibrated,
        gn_passed: gn.iter().filter(|r| r.pass).count(),
        poincare_constant,
        poincare_calibrated,
        poincare_passed: poincare.iter().filter(|r| r.pass).count(),
    })
}
