use std::collections::BTreeMap;

use serde::Serialize;

/// Outcome of a randomized inequality suite.
///
/// `worst_slack` is the smallest relative margin `(rhs - lhs) / max(|rhs|, floor)`
/// seen across all recorded instances; a violation is an instance whose margin
/// fell below `-tol`. A suite passes when `violations == 0`.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub samples: u64,
    pub violations: u64,
    pub worst_slack: f64,
    pub constants: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            samples: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
            constants: BTreeMap::new(),
        }
    }

    /// Record one instance of an inequality `lhs <= rhs` at relative
    /// tolerance `tol`.
    pub fn record(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.samples += 1;
        let scale = rhs.abs().max(lhs.abs()).max(1e-300);
        let slack = (rhs - lhs) / scale;
        if slack < self.worst_slack {
            self.worst_slack = slack;
        }
        if slack < -tol || !lhs.is_finite() || !rhs.is_finite() {
            self.violations += 1;
        }
    }

    /// Record an instance that was evaluated but intentionally not asserted
    /// (boundary case skipped by the hypotheses).
    pub fn record_skipped(&mut self) {
        self.samples += 1;
    }

    pub fn set_constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.insert(name.into(), value);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Fold another suite's counts into this one (used when a suite is built
    /// from sub-suites).
    pub fn absorb(&mut self, other: &VerificationReport) {
        self.samples += other.samples;
        self.violations += other.violations;
        if other.worst_slack < self.worst_slack {
            self.worst_slack = other.worst_slack;
        }
        for (k, v) in &other.constants {
            self.constants.insert(format!("{}.{}", other.suite, k), *v);
        }
    }
}
