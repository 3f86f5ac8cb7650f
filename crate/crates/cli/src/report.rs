//! The structured (`--format json`) output schema.

use rs1::eval::Cost;
use rs1::metrics::{AuditMetric, AuditReport};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One JSON object per invocation (one per input line in the REPL).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub mode: String,
    pub ok: bool,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub ty: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fragment: Option<FragmentSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

impl Report {
    pub fn new(command: &str, mode: &str) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            mode: mode.to_string(),
            ok: true,
            ty: None,
            value: None,
            size: None,
            depth: None,
            cost: None,
            audit: None,
            fragment: None,
            error: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub steps: u64,
    pub allocations: u64,
    pub step_entries: u64,
    pub memo_hits: u64,
    pub memo_misses: u64,
    pub thunk_forces: u64,
}

impl From<&Cost> for CostReport {
    fn from(c: &Cost) -> Self {
        CostReport {
            steps: c.steps,
            allocations: c.allocations,
            step_entries: c.step_entries(),
            memo_hits: c.memo_hits,
            memo_misses: c.memo_misses,
            thunk_forces: c.thunk_forces,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRowReport {
    pub n: u64,
    pub size: u64,
    pub steps: u64,
    pub bound: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub metric: String,
    pub degree: u32,
    pub coeff: String,
    pub pass: bool,
    pub max_residual: Option<f64>,
    pub stopped_early: bool,
    pub rows: Vec<AuditRowReport>,
}

impl From<&AuditReport> for AuditSummary {
    fn from(r: &AuditReport) -> Self {
        AuditSummary {
            metric: match r.metric {
                AuditMetric::Size => "size",
                AuditMetric::Steps => "steps",
            }
            .to_string(),
            degree: r.degree,
            coeff: r.coeff.clone(),
            pass: r.pass,
            max_residual: r.max_residual.is_finite().then_some(r.max_residual),
            stopped_early: r.stopped_early,
            rows: r
                .rows
                .iter()
                .map(|row| AuditRowReport { n: row.n, size: row.size, steps: row.steps, bound: row.bound.clone(), pass: row.pass })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentSummary {
    pub allowed: Vec<String>,
    pub inside: bool,
    pub offending_term: Option<String>,
    pub offending_type: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// parse, usage, declaration, type, evaluation or audit.
    pub stage: String,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
}
