//! Machine-readable residual reports.

use serde::Serialize;

use crate::bank::TupleBank;
use crate::error::Result;
use crate::operator::MultiOperator;
use crate::space::{BasisIndex, GradedElement, GradedSpace};

/// A non-zero residual found by a check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub check: String,
    pub tuple: Vec<String>,
    pub residual: String,
}

/// Outcome of one or more identity checks.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    /// Number of (check, tuple) evaluations performed.
    pub evaluated: usize,
    pub failures: Vec<Residual>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: Report) {
        self.evaluated += other.evaluated;
        self.failures.extend(other.failures);
    }

    pub fn record(&mut self, check: &str, space: &GradedSpace, tuple: &[BasisIndex], residual: &GradedElement) {
        self.evaluated += 1;
        if !residual.is_zero() {
            self.failures.push(Residual {
                check: check.to_string(),
                tuple: tuple.iter().map(|i| space.format_index(i)).collect(),
                residual: residual.to_string(),
            });
        }
    }

    /// Records an element-level residual not tied to a basis tuple.
    pub fn record_element(&mut self, check: &str, label: &str, residual: &GradedElement) {
        self.evaluated += 1;
        if !residual.is_zero() {
            self.failures.push(Residual {
                check: check.to_string(),
                tuple: vec![label.to_string()],
                residual: residual.to_string(),
            });
        }
    }

    /// One JSON object per failure, newline separated.
    pub fn to_json_lines(&self) -> String {
        self.failures.iter().map(|r| serde_json::to_string(r).expect("plain strings serialize") + "\n").collect()
    }
}

/// Evaluates `op` on every bank tuple and records any non-zero value.
pub fn check_vanishes(check: &str, op: &MultiOperator, bank: &TupleBank) -> Result<Report> {
    let mut report = Report::new();
    let space = op.space().clone();
    for t in bank.tuples() {
        let v = op.eval_basis(t)?;
        report.record(check, &space, t, &v);
    }
    Ok(report)
}

/// Records `f - g` on every bank tuple.
pub fn check_equal(check: &str, f: &MultiOperator, g: &MultiOperator, bank: &TupleBank) -> Result<Report> {
    let mut report = Report::new();
    let space = f.space().clone();
    for t in bank.tuples() {
        let d = f.eval_basis(t)?.checked_sub(&*g.eval_basis(t)?)?;
        report.record(check, &space, t, &d);
    }
    Ok(report)
}
