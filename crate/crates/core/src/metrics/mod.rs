//! Apparent size, observed size and empirical growth audits.

mod audit;
mod size;

pub use audit::{audit_growth, measure_family, AuditError, AuditMetric, AuditReport, AuditRow, GrowthAudit, Measurement};
pub use size::{apparent_size, is_rank0_codata, observed_size, observed_size_with};
