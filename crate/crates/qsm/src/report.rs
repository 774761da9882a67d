//! Validation reports: flat lists of named checks with residuals.
//!
//! Every verifier in this crate returns a [`ValidationReport`] instead of
//! failing eagerly, so callers (and the CLI) can print the full picture and
//! decide on exit codes themselves. Check ids are stable, dot-separated tags
//! (`hom.mult`, `qsm.b`, `prop2.iv`, `theorem4.i`, ...) so suites can be
//! grepped end to end.

use serde::{Deserialize, Serialize};

/// One named check with an optional numeric residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckItem {
    pub id: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub detail: String,
}

impl CheckItem {
    pub fn new(id: &str, passed: bool, residual: Option<f64>, detail: impl Into<String>) -> Self {
        Self {
            id: id.to_string(),
            passed,
            residual,
            detail: detail.into(),
        }
    }

    /// Check that a residual stays below a tolerance.
    pub fn residual_le(id: &str, residual: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self::new(id, residual.abs() <= tol, Some(residual), detail)
    }
}

/// An ordered collection of checks.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckItem>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, item: CheckItem) {
        self.checks.push(item);
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    /// True iff every recorded check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Largest absolute residual over all checks that carry one.
    pub fn worst_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| c.residual)
            .fold(0.0, |acc, r| acc.max(r.abs()))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, id: &str) -> Option<&CheckItem> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_aggregates() {
        let mut report = ValidationReport::new();
        report.push(CheckItem::residual_le("a", 1e-12, 1e-9, "ok"));
        report.push(CheckItem::new("b", true, None, "flag"));
        assert!(report.passed());
        assert!(report.worst_residual() < 1e-9);

        report.push(CheckItem::residual_le("c", 0.5, 1e-9, "bad"));
        assert!(!report.passed());
        assert_eq!(report.failures().count(), 1);
        assert!(report.find("c").is_some());
    }
}
