//! JSON forms of algebra elements and reports.

use std::collections::BTreeMap;

use periodic_hall::dhall::DhElement;
use periodic_hall::report::Report;
use periodic_hall::sdh::SdhElement;
use serde::Serialize;
use serde_json::{json, Value};

/// Terms of an SDH element; torus exponents are doubled, one vector per degree.
pub fn sdh_terms(x: &SdhElement) -> Value {
    let terms: Vec<Value> = x
        .terms
        .iter()
        .map(|(k, c)| json!({"coeff": c.to_strings(), "torus": k.torus, "stalks": k.stalks}))
        .collect();
    Value::Array(terms)
}

pub fn dh_terms(x: &DhElement) -> Value {
    let terms: Vec<Value> = x.terms.iter().map(|(k, c)| json!({"coeff": c.to_strings(), "stalks": k})).collect();
    Value::Array(terms)
}

/// Pass counts of one identity within one suite.
#[derive(Clone, Debug, Serialize)]
pub struct IdentitySummary {
    pub suite: String,
    pub identity: String,
    pub gated: bool,
    pub passed: usize,
    pub total: usize,
}

/// Per-identity counts in suite, identity, gating order.
pub fn identity_summaries(report: &Report) -> Vec<IdentitySummary> {
    let mut map: BTreeMap<(String, String, bool), (usize, usize)> = BTreeMap::new();
    for c in &report.cases {
        let e = map.entry((c.suite.clone(), c.identity.clone(), c.gated)).or_insert((0, 0));
        e.1 += 1;
        if c.passed {
            e.0 += 1;
        }
    }
    map.into_iter()
        .map(|((suite, identity, gated), (passed, total))| IdentitySummary { suite, identity, gated, passed, total })
        .collect()
}

pub fn report_json(report: &Report, config: Value) -> Value {
    let cases: Vec<Value> = report
        .cases
        .iter()
        .map(|c| {
            json!({
                "suite": c.suite,
                "identity": c.identity,
                "case": c.case,
                "passed": c.passed,
                "gated": c.gated,
                "lhs": c.lhs,
                "rhs": c.rhs,
            })
        })
        .collect();
    json!({
        "config": config,
        "passed": report.passed(),
        "exit_code": report.exit_code(),
        "summary": identity_summaries(report),
        "cases": cases,
        "findings": report.findings,
        "aborted": report.aborted,
    })
}

/// Human-readable report: one line per identity, then failures, findings and aborts.
pub fn report_text(report: &Report) -> String {
    let mut out = String::new();
    for s in identity_summaries(report) {
        let status = if s.passed == s.total {
            "pass"
        } else if s.gated {
            "FAIL"
        } else {
            "fail (report-only)"
        };
        out.push_str(&format!("{:<22} {:<34} {:>6}/{:<6} {}\n", s.suite, s.identity, s.passed, s.total, status));
    }
    let failures: Vec<_> = report.cases.iter().filter(|c| !c.passed).collect();
    for c in failures.iter().take(20) {
        let tag = if c.gated { "failure" } else { "report-only failure" };
        out.push_str(&format!("{}: {} {} {}\n", tag, c.suite, c.identity, c.case));
        if !c.lhs.is_empty() || !c.rhs.is_empty() {
            out.push_str(&format!("  lhs: {}\n  rhs: {}\n", c.lhs, c.rhs));
        }
    }
    if failures.len() > 20 {
        out.push_str(&format!("... {} more failing cases\n", failures.len() - 20));
    }
    for f in &report.findings {
        out.push_str(&format!("finding: {}\n", f));
    }
    for a in &report.aborted {
        out.push_str(&format!("aborted: {}\n", a));
    }
    let verdict = match report.exit_code() {
        0 => "pass",
        1 => "fail",
        _ => "aborted",
    };
    out.push_str(&format!("verdict: {} ({} cases)\n", verdict, report.cases.len()));
    out
}
