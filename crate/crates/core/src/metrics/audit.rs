use std::fmt::Write;

use num_rational::Ratio;
use serde::Serialize;

use super::size::{apparent_size, is_rank0_codata, observed_size_with};
use crate::eval::{alloc_numeral, EvalConfig, EvalError, Evaluator, Heap};
use crate::typesys::Ty;
use crate::Compiled;

/// What an audit compares against the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditMetric {
    /// Apparent size of a data result, observed size at depth `n` of a codata result.
    Size,
    /// Evaluation steps of the application to `n`.
    Steps,
}

/// A claimed bound `measured(n) <= coeff * (n+1)^degree` for a family: a
/// program whose body has type `nat -> tau`, instantiated at numerals `n`.
#[derive(Clone, Debug)]
pub struct GrowthAudit {
    pub samples: Vec<u64>,
    pub degree: u32,
    pub coeff: Ratio<u128>,
    pub metric: AuditMetric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub n: u64,
    pub size: u64,
    pub steps: u64,
    /// `coeff * (n+1)^degree`, exact, as `p` or `p/q`; `None` on overflow.
    pub bound: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub metric: AuditMetric,
    pub degree: u32,
    pub coeff: String,
    pub rows: Vec<AuditRow>,
    pub pass: bool,
    /// Largest `measured - bound` over the evaluated rows (negative when all pass).
    pub max_residual: f64,
    /// True when evaluation stopped at the first failing sample.
    pub stopped_early: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
pub enum AuditError {
    #[error("samples must be strictly increasing")]
    UnsortedSamples,
    #[error("the family body must have type `nat -> T` for a unary numeral type `nat`, found `{0}`")]
    NotAFamily(String),
    #[error("sample n = {n} failed: {error}")]
    Sample { n: u64, error: EvalError },
}

impl AuditError {
    pub fn code(&self) -> &'static str {
        match self {
            AuditError::UnsortedSamples => "unsorted-samples",
            AuditError::NotAFamily(_) => "not-a-family",
            AuditError::Sample { .. } => "sample-failed",
        }
    }
}

/// One sample of a family: apparent or observed size and step count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub size: u64,
    pub steps: u64,
}

/// Evaluate `family` at `n`. Steps count only the application to the
/// numeral; probing a codata result (to depth `n`) is not charged.
pub fn measure_family(family: &Compiled, n: u64, config: EvalConfig) -> Result<Measurement, AuditError> {
    let Ty::Arrow(dom, cod) = &family.ty else {
        return Err(AuditError::NotAFamily(family.ty.to_string()));
    };
    let nat = match &**dom {
        Ty::Base { name, .. } => family.decls.get(name),
        _ => None,
    }
    .ok_or_else(|| AuditError::NotAFamily(family.ty.to_string()))?;
    let sample = |error| AuditError::Sample { n, error };
    let mut heap = Heap::new();
    let f = {
        let mut ev = Evaluator::new(&family.decls, &mut heap, config);
        ev.eval(&family.program.body, &crate::eval::Env::new()).map_err(sample)?
    };
    let arg = alloc_numeral(&mut heap, nat, n).map_err(|_| AuditError::NotAFamily(family.ty.to_string()))?;
    let mut ev = Evaluator::new(&family.decls, &mut heap, config);
    let v = ev.apply(&f, arg).map_err(sample)?;
    let steps = ev.cost().steps;
    let size = if is_rank0_codata(cod, &family.decls) {
        observed_size_with(&mut ev, &v, n).map_err(sample)?
    } else {
        apparent_size(&[v], ev.heap)
    };
    Ok(Measurement { size, steps })
}

fn bound(coeff: Ratio<u128>, n: u64, degree: u32) -> Option<Ratio<u128>> {
    let base = u128::from(n).checked_add(1)?.checked_pow(degree)?;
    Some(Ratio::new(coeff.numer().checked_mul(base)?, *coeff.denom()))
}

fn to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Run the audit, stopping at the first sample that exceeds the bound.
pub fn audit_growth(family: &Compiled, audit: &GrowthAudit, config: EvalConfig) -> Result<AuditReport, AuditError> {
    if audit.samples.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AuditError::UnsortedSamples);
    }
    let mut rows = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    let mut pass = true;
    for &n in &audit.samples {
        let m = measure_family(family, n, config)?;
        let measured = match audit.metric {
            AuditMetric::Size => m.size,
            AuditMetric::Steps => m.steps,
        };
        let b = bound(audit.coeff, n, audit.degree);
        let ok = match &b {
            Some(b) => Ratio::from_integer(u128::from(measured)) <= *b,
            None => true,
        };
        if let Some(b) = &b {
            max_residual = max_residual.max(measured as f64 - to_f64(b));
        }
        rows.push(AuditRow { n, size: m.size, steps: m.steps, bound: b.map(|b| b.to_string()), pass: ok });
        if !ok {
            pass = false;
            break;
        }
    }
    let stopped_early = rows.len() < audit.samples.len();
    Ok(AuditReport {
        metric: audit.metric,
        degree: audit.degree,
        coeff: audit.coeff.to_string(),
        rows,
        pass,
        max_residual,
        stopped_early,
    })
}

impl AuditReport {
    /// Line-oriented table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let metric = match self.metric {
            AuditMetric::Size => "size",
            AuditMetric::Steps => "steps",
        };
        writeln!(out, "bound: {metric} <= {} * (n+1)^{}", self.coeff, self.degree).unwrap();
        writeln!(out, "{:>6} {:>12} {:>12} {:>16} ok", "n", "size", "steps", "bound").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:>6} {:>12} {:>12} {:>16} {}",
                r.n,
                r.size,
                r.steps,
                r.bound.as_deref().unwrap_or("overflow"),
                if r.pass { "pass" } else { "FAIL" }
            )
            .unwrap();
        }
        if self.stopped_early {
            writeln!(out, "stopped at the first failing sample").unwrap();
        }
        writeln!(out, "max residual: {}", self.max_residual).unwrap();
        writeln!(out, "{}", if self.pass { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}
