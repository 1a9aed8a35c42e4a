//! Acceptance criteria, one pass/fail line each, exact equality throughout.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use periodic_hall::checks::{
    assoc_suite, basis_suite, count_nonsplit_acyclic, derived_suite, embedding_suite, embedding_suite_with, engine_suite,
    euler_suite, factorization_total, free_module_suite, relation_suite, DEFAULT_COMPLEX_BUDGET, DEFAULT_SEED,
};
use periodic_hall::coeff::CoeffElem;
use periodic_hall::dhall::DhAlgebra;
use periodic_hall::embed::MiddleSigns;
use periodic_hall::rep::Quiver;
use periodic_hall::report::Report;
use periodic_hall::sdh::{SdhAlgebra, SdhElement};
use periodic_hall::table::CategoryTable;

const MAX_DIM: usize = 2;
const BOUND: usize = 4;
const TRIALS: usize = 100;

struct Outcome {
    passed: bool,
    detail: String,
}

fn tables(qs: &[u32]) -> Vec<CategoryTable> {
    let mut out = Vec::new();
    for &q in qs {
        for quiver in [Quiver::a1(), Quiver::a2()] {
            out.push(CategoryTable::build(quiver, q, BOUND).expect("table"));
        }
    }
    out
}

fn label(table: &CategoryTable) -> String {
    format!("{} q={}", if table.quiver.n == 1 { "a1" } else { "a2" }, table.q)
}

/// Gated verdict of a merged report, with a short count and the first failure.
fn judge(report: &Report, extra: &str) -> Outcome {
    let gated = report.cases.iter().filter(|c| c.gated).count();
    let mut detail = format!("{} gated cases", gated);
    let ungated = report.cases.len() - gated;
    if ungated > 0 {
        detail.push_str(&format!(", {} report-only ({} failing)", ungated, report.ungated_failures().len()));
    }
    if !extra.is_empty() {
        detail.push_str(", ");
        detail.push_str(extra);
    }
    if let Some(c) = report.gated_failures().first() {
        detail.push_str(&format!("; first failure: {} {} {}", c.suite, c.identity, c.case));
    }
    if let Some(a) = report.aborted.first() {
        detail.push_str(&format!("; aborted: {}", a));
    }
    Outcome { passed: report.passed() && gated > 0, detail }
}

fn prefixed(mut r: Report, table: &CategoryTable) -> Report {
    let p = label(table);
    for c in &mut r.cases {
        c.case = format!("{} {}", p, c.case);
    }
    for f in &mut r.findings {
        *f = format!("{} {}", p, f);
    }
    r
}

fn euler() -> Outcome {
    let mut report = Report::new();
    let mut nonsplit = 0;
    for table in tables(&[2, 3]) {
        for t in 1..=3 {
            let total = factorization_total(table.q, t);
            report.merge(prefixed(euler_suite(&table, t, MAX_DIM, total, DEFAULT_COMPLEX_BUDGET), &table));
            nonsplit += count_nonsplit_acyclic(&table, t, total, DEFAULT_COMPLEX_BUDGET).unwrap_or(0);
        }
    }
    let factorized = report.count("euler-factorization-left") + report.count("euler-factorization-right");
    let mut out = judge(&report, &format!("{} non-split acyclic complexes, {} factorization checks", nonsplit, factorized));
    out.passed &= nonsplit >= 3;
    out
}

fn per_period(periods: &[usize], qs: &[u32], run: &dyn Fn(&CategoryTable, usize) -> Report) -> Report {
    let mut report = Report::new();
    for table in tables(qs) {
        for &t in periods {
            report.merge(prefixed(run(&table, t), &table));
        }
    }
    report
}

fn basis() -> Outcome {
    let mut report = per_period(&[1, 2, 3], &[2], &|table, t| {
        let mut r = basis_suite(table, t, factorization_total(table.q, t), DEFAULT_COMPLEX_BUDGET, true);
        r.merge(free_module_suite(table, t, MAX_DIM));
        r
    });
    report.merge(per_period(&[4], &[2], &|table, t| basis_suite(table, t, BOUND, DEFAULT_COMPLEX_BUDGET, false)));
    let t4 = report.cases.iter().filter(|c| !c.gated).count();
    let findings = if report.findings.is_empty() {
        "t=4 scalar agrees with brute force".to_string()
    } else {
        format!("findings: {}", report.findings.join(" | "))
    };
    let mut out = judge(&report, &format!("t=4 {} cases, {}", t4, findings));
    out.passed &= t4 > 0;
    out
}

fn embedding() -> Outcome {
    let mut report = per_period(&[1, 3], &[2, 3], &|table, t| embedding_suite(table, t, MAX_DIM, true));
    let five = per_period(&[5], &[2], &|table, t| embedding_suite(table, t, MAX_DIM, false));
    let alt = per_period(&[5], &[2], &|table, t| embedding_suite_with(table, t, MAX_DIM, false, MiddleSigns::Alternating));
    let note = format!(
        "t=5 report-only: stated signs {}/{} pass, alternating signs {}/{} pass",
        five.cases.iter().filter(|c| c.passed).count(),
        five.cases.len(),
        alt.cases.iter().filter(|c| c.passed).count(),
        alt.cases.len()
    );
    report.merge(five);
    report.merge(alt);
    judge(&report, &note)
}

fn pins() -> Outcome {
    let table = CategoryTable::build(Quiver::a1(), 2, BOUND).expect("table");
    let s = table.find_by_name("S").unwrap();
    let ss = table.find_by_name("S⊕S").unwrap();
    let sdh = SdhAlgebra::new(&table, 1).unwrap();
    let u = SdhElement::stalk(&table, 1, s, 0).unwrap();
    let half = CoeffElem::from_ratio(2, 1, 2);
    let expected = SdhElement::stalk(&table, 1, ss, 0)
        .unwrap()
        .add(&SdhElement::k_generator(1, 2, &[1], 0).unwrap())
        .scale(&half);
    let brute = sdh.mul_bruteforce(&u, &u).unwrap();
    let rewrite = sdh.mul_rewrite(&u, &u).unwrap();
    let dh = DhAlgebra::new(&table, 1).unwrap();
    let z = dh.generator(s, 0).unwrap();
    let inv_v = CoeffElem::v(2).inv().unwrap();
    let zz = dh.generator(ss, 0).unwrap().add(&dh.one()).scale(&inv_v);
    let product = dh.dh_mul(&z, &z).unwrap();
    let ok_u = brute == expected && rewrite == expected;
    let ok_z = product == zz;
    Outcome {
        passed: ok_u && ok_z,
        detail: format!("U_S⋄U_S = {} ({}), Z_S·Z_S = {} ({})", brute.render(&table), ok_u, product.render(&table), ok_z),
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("euler-form suite", Duration::from_secs(60), Box::new(euler)),
        (
            "relation suite",
            Duration::from_secs(300),
            Box::new(|| judge(&per_period(&[1, 3, 4], &[2], &|tb, t| relation_suite(tb, t, MAX_DIM)), "")),
        ),
        (
            "engine agreement",
            Duration::from_secs(300),
            Box::new(|| judge(&per_period(&[1, 3, 4], &[2], &|tb, t| engine_suite(tb, t, MAX_DIM)), "")),
        ),
        (
            "associativity fuzz",
            Duration::from_secs(300),
            Box::new(|| judge(&per_period(&[1, 3, 4], &[2], &|tb, t| assoc_suite(tb, t, TRIALS, DEFAULT_SEED, MAX_DIM)), "")),
        ),
        ("basis and normal form", Duration::from_secs(300), Box::new(basis)),
        (
            "derived Hall suite",
            Duration::from_secs(300),
            Box::new(|| judge(&per_period(&[1, 3], &[2, 3], &|tb, t| derived_suite(tb, t, MAX_DIM, TRIALS, DEFAULT_SEED)), "")),
        ),
        ("embedding suite", Duration::from_secs(300), Box::new(embedding)),
        ("worked-example pins", Duration::from_secs(60), Box::new(pins)),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let passed = outcome.passed && elapsed < *limit;
        all &= passed;
        println!(
            "criterion {} {}: {} ({}; {:.2}s of {}s)",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
