//! The `verify` command.

use std::path::PathBuf;

use periodic_hall::checks::{
    assoc_suite, basis_suite, derived_suite, embedding_suite_with, engine_suite, euler_suite, factorization_total,
    free_module_suite, relation_suite, DEFAULT_COMPLEX_BUDGET,
};
use periodic_hall::embed::MiddleSigns;
use periodic_hall::report::Report;
use periodic_hall::table::CategoryTable;
use serde_json::json;

use crate::{build_table, env_budget, output, resolve_quiver, CliError, COMPLEX_BUDGET_ENV};

/// Largest stalk dimension of the generator pairs.
const MAX_DIM: usize = 2;
/// Table bound: room for products of two generators of dimension `MAX_DIM`.
const BOUND: usize = 4;

pub struct VerifyArgs {
    pub suite: String,
    pub q: String,
    pub t: Option<String>,
    pub quiver: String,
    pub seed: u64,
    pub trials: usize,
    pub output: Option<PathBuf>,
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Suite {
    Euler,
    Relations,
    Engines,
    Assoc,
    Basis,
    Derived,
    Embedding,
}

const ALL: [Suite; 7] =
    [Suite::Euler, Suite::Relations, Suite::Engines, Suite::Assoc, Suite::Basis, Suite::Derived, Suite::Embedding];

impl Suite {
    fn parse(s: &str) -> Result<Vec<Suite>, CliError> {
        Ok(match s {
            "euler" => vec![Suite::Euler],
            "relations" => vec![Suite::Relations],
            "engines" => vec![Suite::Engines],
            "assoc" => vec![Suite::Assoc],
            "basis" => vec![Suite::Basis],
            "derived" => vec![Suite::Derived],
            "embedding" => vec![Suite::Embedding],
            "all" => ALL.to_vec(),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown suite {:?}; expected euler, relations, engines, assoc, basis, derived, embedding or all",
                    other
                )))
            }
        })
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Euler => "euler",
            Suite::Relations => "relations",
            Suite::Engines => "engines",
            Suite::Assoc => "assoc",
            Suite::Basis => "basis",
            Suite::Derived => "derived",
            Suite::Embedding => "embedding",
        }
    }

    /// Default periods as `(t, gated)`.
    fn default_periods(self) -> Vec<(usize, bool)> {
        match self {
            Suite::Euler => vec![(1, true), (2, true), (3, true)],
            Suite::Relations | Suite::Engines | Suite::Assoc => vec![(1, true), (3, true), (4, true)],
            Suite::Basis => vec![(1, true), (2, true), (3, true), (4, false)],
            Suite::Derived => vec![(1, true), (3, true)],
            Suite::Embedding => vec![(1, true), (3, true), (5, false)],
        }
    }

    /// Why the suite cannot run at period `t`, if it cannot.
    fn rejects(self, t: usize) -> Option<String> {
        match self {
            Suite::Derived | Suite::Embedding if t % 2 == 0 => {
                Some(format!("the {} suite needs an odd period, got t={}", self.name(), t))
            }
            Suite::Relations | Suite::Engines if t == 2 => {
                Some(format!("the {} suite needs the rewrite engine, which does not support t=2", self.name()))
            }
            _ => None,
        }
    }

    /// Explicit periods gate up to t = 3; basis at t = 4 and embedding at t = 5
    /// are known to be report-only.
    fn gated_at(self, t: usize) -> bool {
        match self {
            Suite::Basis => t <= 3,
            Suite::Embedding => t <= 3,
            _ => true,
        }
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_numbers<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    split_list(s).map(|x| x.parse().map_err(|_| CliError::Usage(format!("bad {} {:?}", what, x)))).collect()
}

fn run_one(suite: Suite, table: &CategoryTable, t: usize, gated: bool, args: &VerifyArgs, budget: u128) -> Report {
    let q = table.q;
    match suite {
        Suite::Euler => euler_suite(table, t, MAX_DIM, factorization_total(q, t), budget),
        Suite::Relations => relation_suite(table, t, MAX_DIM),
        Suite::Engines => engine_suite(table, t, MAX_DIM),
        Suite::Assoc => assoc_suite(table, t, args.trials, args.seed, MAX_DIM),
        Suite::Basis => {
            let mut r = basis_suite(table, t, factorization_total(q, t), budget, gated);
            r.merge(free_module_suite(table, t, MAX_DIM));
            r
        }
        Suite::Derived => derived_suite(table, t, MAX_DIM, args.trials, args.seed),
        Suite::Embedding => {
            let mut r = embedding_suite_with(table, t, MAX_DIM, gated, MiddleSigns::Positive);
            if !gated {
                r.merge(embedding_suite_with(table, t, MAX_DIM, false, MiddleSigns::Alternating));
            }
            r
        }
    }
}

pub fn run(args: &VerifyArgs) -> Result<u8, CliError> {
    let mut suites = Vec::new();
    for s in split_list(&args.suite) {
        for x in Suite::parse(s)? {
            if !suites.contains(&x) {
                suites.push(x);
            }
        }
    }
    suites.sort();
    let explicit: Option<Vec<usize>> = args.t.as_deref().map(|s| parse_numbers(s, "period")).transpose()?;
    if let Some(ts) = &explicit {
        if ts.contains(&0) {
            return Err(CliError::Usage("periods must be at least 1".into()));
        }
        // a single named suite rejects unsupported periods outright
        if suites.len() == 1 {
            if let Some(msg) = ts.iter().find_map(|&t| suites[0].rejects(t)) {
                return Err(CliError::Usage(msg));
            }
        }
    }
    let qs: Vec<u32> = parse_numbers(&args.q, "prime")?;
    let quivers: Vec<&str> = split_list(&args.quiver).collect();
    let budget = env_budget(COMPLEX_BUDGET_ENV, DEFAULT_COMPLEX_BUDGET)?;

    let mut report = Report::new();
    if !suites.is_empty() {
        for &q in &qs {
            for &qn in &quivers {
                let table = build_table(resolve_quiver(qn)?, q, BOUND)?;
                for &suite in &suites {
                    let periods: Vec<(usize, bool)> = match &explicit {
                        Some(ts) => ts.iter().map(|&t| (t, suite.gated_at(t))).collect(),
                        None => suite.default_periods(),
                    };
                    for (t, gated) in periods {
                        if let Some(msg) = suite.rejects(t) {
                            report.finding(format!("skipped: {}", msg));
                            continue;
                        }
                        let mut r = run_one(suite, &table, t, gated, args, budget);
                        let prefix = format!("{} q={} ", qn, q);
                        for c in &mut r.cases {
                            c.case = format!("{}{}", prefix, c.case);
                        }
                        for f in &mut r.findings {
                            *f = format!("{}{}", prefix, f);
                        }
                        for a in &mut r.aborted {
                            *a = format!("{}{}", prefix, a);
                        }
                        report.merge(r);
                    }
                }
            }
        }
    }
    report.sort();
    report.findings.sort();
    report.findings.dedup();
    report.aborted.sort();

    let config = json!({
        "suites": suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "q": qs,
        "t": explicit,
        "quivers": quivers,
        "bound": BOUND,
        "max_dim": MAX_DIM,
        "seed": args.seed,
        "trials": args.trials,
        "complex_budget": budget.to_string(),
    });
    let value = output::report_json(&report, config);
    let text = serde_json::to_string_pretty(&value).unwrap_or_default() + "\n";
    if let Some(path) = &args.output {
        std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))?;
    }
    if args.json {
        print!("{}", text);
    } else {
        print!("{}", output::report_text(&report));
    }
    Ok(report.exit_code() as u8)
}
