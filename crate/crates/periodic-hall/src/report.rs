//! Check results collected by the verification suites.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::HallError;

/// One evaluated identity instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckCase {
    pub suite: String,
    /// Short name of the identity being checked, e.g. `sdh-same-degree`.
    pub identity: String,
    /// The instance, e.g. the generator pair and the period.
    pub case: String,
    pub passed: bool,
    /// Whether a failure makes the run fail.
    pub gated: bool,
    pub lhs: String,
    pub rhs: String,
}

/// The outcome of one or more suites.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub cases: Vec<CheckCase>,
    /// Checks that could not run because a resource cap was hit.
    pub aborted: Vec<String>,
    /// Observations that do not affect the verdict.
    pub findings: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn record(
        &mut self,
        suite: &str,
        identity: &str,
        case: String,
        passed: bool,
        gated: bool,
        lhs: String,
        rhs: String,
    ) {
        self.cases.push(CheckCase { suite: suite.into(), identity: identity.into(), case, passed, gated, lhs, rhs });
    }

    /// Record an equality check; both sides are kept only on failure.
    pub fn check_eq<T: PartialEq>(
        &mut self,
        suite: &str,
        identity: &str,
        case: String,
        gated: bool,
        lhs: &T,
        rhs: &T,
        show: &dyn Fn(&T) -> String,
    ) -> bool {
        let passed = lhs == rhs;
        let (l, r) = if passed { (String::new(), String::new()) } else { (show(lhs), show(rhs)) };
        self.record(suite, identity, case, passed, gated, l, r);
        passed
    }

    /// Record an error raised while evaluating a case.
    pub fn record_error(&mut self, suite: &str, identity: &str, case: String, gated: bool, err: &HallError) {
        if let HallError::Resource(msg) = err {
            self.aborted.push(alloc::format!("{} {} {}: {}", suite, identity, case, msg));
        } else {
            self.record(suite, identity, case, false, gated, alloc::format!("error: {}", err), String::new());
        }
    }

    pub fn finding(&mut self, text: String) {
        self.findings.push(text);
    }

    pub fn merge(&mut self, other: Report) {
        self.cases.extend(other.cases);
        self.aborted.extend(other.aborted);
        self.findings.extend(other.findings);
    }

    /// Sort cases by suite, identity and case for deterministic output.
    pub fn sort(&mut self) {
        self.cases.sort();
    }

    pub fn gated_failures(&self) -> Vec<&CheckCase> {
        self.cases.iter().filter(|c| c.gated && !c.passed).collect()
    }

    pub fn ungated_failures(&self) -> Vec<&CheckCase> {
        self.cases.iter().filter(|c| !c.gated && !c.passed).collect()
    }

    /// No gated failure and no aborted check.
    pub fn passed(&self) -> bool {
        self.gated_failures().is_empty() && self.aborted.is_empty()
    }

    pub fn count(&self, identity: &str) -> usize {
        self.cases.iter().filter(|c| c.identity == identity).count()
    }

    /// Exit status: 0 when everything gated passes, 1 on a gated failure, 2 on a resource abort.
    pub fn exit_code(&self) -> i32 {
        if !self.aborted.is_empty() {
            2
        } else if !self.gated_failures().is_empty() {
            1
        } else {
            0
        }
    }
}
