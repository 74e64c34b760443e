//! Tabulation, degree validation and the textual dump format.
//!
//! ```text
//! # space <id>
//! # degree <d>
//! # arities <a,b,…>
//! [idx, …] -> idx => series; …
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use super::{check_degree, MultiOperator};
use crate::bank::TupleBank;
use crate::error::{Error, Result};
use crate::scalar::MultiSeries;
use crate::space::{BasisIndex, GradedElement, GradedSpace};

/// One non-zero line of a dump.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DumpEntry {
    pub tuple: Vec<BasisIndex>,
    pub value: GradedElement,
}

impl MultiOperator {
    /// Tabulates the operator on a bank; the result is a table operator that
    /// agrees with `self` on every bank tuple.
    pub fn tabulate(&self, bank: &TupleBank) -> Result<MultiOperator> {
        let mut entries = Vec::new();
        for item in self.values(bank) {
            let (t, v) = item?;
            if !v.is_zero() {
                entries.push((t.to_vec(), (*v).clone()));
            }
        }
        MultiOperator::table(self.space(), self.degree(), self.support().arities(), entries)
    }

    /// Checks `|f(v_1,…,v_n)| = |f| + Σ|v_i|` on every bank tuple.
    pub fn validate_degrees(&self, bank: &TupleBank) -> Result<()> {
        let space = self.space();
        for item in self.values(bank) {
            let (t, v) = item?;
            let expected = self.degree() + t.iter().map(|i| space.degree_of(i)).sum::<i64>();
            check_degree(&v, expected)?;
        }
        Ok(())
    }

    /// The non-zero values on a bank, in bank order.
    pub fn entries(&self, bank: &TupleBank) -> Result<Vec<DumpEntry>> {
        let mut out = Vec::new();
        for item in self.values(bank) {
            let (t, v) = item?;
            if !v.is_zero() {
                out.push(DumpEntry { tuple: t.to_vec(), value: (*v).clone() });
            }
        }
        Ok(out)
    }

    /// Canonical textual dump over a bank.
    pub fn dump(&self, bank: &TupleBank) -> Result<String> {
        let space = self.space();
        let mut out = String::new();
        let arities: Vec<String> = self.support().arities().map(|a| a.to_string()).collect();
        writeln!(out, "# space {}", space.id()).unwrap();
        writeln!(out, "# degree {}", self.degree()).unwrap();
        writeln!(out, "# arities {}", arities.join(",")).unwrap();
        for item in self.values(bank) {
            let (t, v) = item?;
            if v.is_zero() {
                continue;
            }
            let idx: Vec<String> = t.iter().map(|i| space.format_index(i)).collect();
            writeln!(out, "[{}] -> {}", idx.join(", "), v).unwrap();
        }
        Ok(out)
    }
}

/// Parses a dump back into a table operator on `space`.
pub fn parse_dump(space: &Arc<GradedSpace>, text: &str) -> Result<MultiOperator> {
    let bad = |line: &str| Error::Parse(format!("bad dump line `{line}`"));
    let mut degree = None;
    let mut arities = Vec::new();
    let mut entries = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(d) = rest.strip_prefix("degree") {
                degree = Some(d.trim().parse::<i64>().map_err(|_| bad(line))?);
            } else if let Some(a) = rest.strip_prefix("arities") {
                for x in a.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                    arities.push(x.parse::<usize>().map_err(|_| bad(line))?);
                }
            } else if let Some(id) = rest.strip_prefix("space") {
                if id.trim() != space.id() {
                    return Err(Error::SpaceMismatch(space.id().into(), id.trim().into()));
                }
            }
            continue;
        }
        let (lhs, rhs) = line.split_once(" -> ").ok_or_else(|| bad(line))?;
        let inner = lhs.trim().strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(|| bad(line))?;
        let tuple = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(", ").map(|s| space.parse_index(s)).collect::<Result<Vec<_>>>()?
        };
        entries.push((tuple, parse_element(space, rhs)?));
    }
    let degree = degree.ok_or_else(|| Error::Parse("dump without degree header".into()))?;
    MultiOperator::table(space, degree, arities, entries)
}

/// Parses the `idx => series; …` element form (or `0`).
pub fn parse_element(space: &Arc<GradedSpace>, text: &str) -> Result<GradedElement> {
    let text = text.trim();
    if text == "0" {
        return Ok(GradedElement::zero(space));
    }
    let mut terms = Vec::new();
    for part in text.split("; ") {
        let (idx, series) =
            part.split_once(" => ").ok_or_else(|| Error::Parse(format!("bad element term `{part}`")))?;
        terms.push((space.parse_index(idx)?, MultiSeries::parse(space.context(), series)?));
    }
    Ok(GradedElement::from_terms(space, terms))
}
