//! Command-line front end: cached category tables, products and verification suites.

mod cache;
mod mult;
mod output;
mod parse;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use periodic_hall::error::HallError;
use periodic_hall::rep::Quiver;
use periodic_hall::table::{CategoryTable, DEFAULT_TUPLE_BUDGET};

pub const TUPLE_BUDGET_ENV: &str = "PERIODIC_HALL_TUPLE_BUDGET";
pub const COMPLEX_BUDGET_ENV: &str = "PERIODIC_HALL_COMPLEX_BUDGET";

/// Errors reported by the commands, with their exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Resource(String),
    Hall(HallError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Resource(_) | CliError::Hall(HallError::Resource(_)) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => write!(f, "{}", m),
            CliError::Resource(m) => write!(f, "resource limit: {}", m),
            CliError::Hall(e) => write!(f, "{}", e),
        }
    }
}

impl From<HallError> for CliError {
    fn from(e: HallError) -> Self {
        CliError::Hall(e)
    }
}

#[derive(Parser)]
#[command(name = "periodic-hall", version, about = "Exact Hall algebras of periodic complexes of quiver representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Rewrite,
    Brute,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a category table and write or re-verify its JSON cache.
    Enumerate {
        /// `a1`, `a2` or a JSON file `{"n": .., "arrows": [[s, t], ..]}`.
        #[arg(long, default_value = "a2")]
        quiver: String,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Cache directory; defaults to $PERIODIC_HALL_CACHE_DIR, then `.periodic-hall-cache`.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Multiply two basis elements and print the normal form.
    Mult {
        /// Quiver; inferred from the specs when omitted.
        #[arg(long)]
        quiver: Option<String>,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long)]
        t: usize,
        /// Defaults to `rewrite`, or `brute` when t = 2.
        #[arg(long, value_enum)]
        engine: Option<EngineChoice>,
        #[arg(long)]
        json: bool,
        /// `U:S1@0`, `K:1,0@2`, `sqrtK:-1,0@1`, `Z:S1@0` or `1`.
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Run verification suites and report every checked identity.
    Verify {
        /// Comma-separated: euler, relations, engines, assoc, basis, derived, embedding, all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Comma-separated primes.
        #[arg(long, default_value = "2")]
        q: String,
        /// Comma-separated periods; each suite has its own default list.
        #[arg(long)]
        t: Option<String>,
        /// Comma-separated quivers.
        #[arg(long, default_value = "a1,a2")]
        quiver: String,
        #[arg(long, default_value_t = periodic_hall::checks::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Also write the JSON report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

/// Parse a budget override from the environment.
pub fn env_budget(name: &str, default: u128) -> Result<u128, CliError> {
    match std::env::var(name) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse().map_err(|_| CliError::Usage(format!("{} must be a non-negative integer, got {:?}", name, v)))
        }
        _ => Ok(default),
    }
}

/// `a1`, `a2` or a JSON quiver file.
pub fn resolve_quiver(name: &str) -> Result<Quiver, CliError> {
    match name {
        "a1" => Ok(Quiver::a1()),
        "a2" => Ok(Quiver::a2()),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("unknown quiver {:?} (expected a1, a2 or a JSON file): {}", path, e)))?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {}", path, e)))?;
            let n = v["n"].as_u64().ok_or_else(|| CliError::Usage(format!("{}: missing \"n\"", path)))? as usize;
            let arrows: Vec<(usize, usize)> = serde_json::from_value(v["arrows"].clone())
                .map_err(|e| CliError::Usage(format!("{}: bad \"arrows\": {}", path, e)))?;
            Ok(Quiver::new(n, arrows)?)
        }
    }
}

pub fn build_table(quiver: Quiver, q: u32, bound: usize) -> Result<CategoryTable, CliError> {
    let budget = env_budget(TUPLE_BUDGET_ENV, DEFAULT_TUPLE_BUDGET)?;
    Ok(CategoryTable::build_with_budget(quiver, q, bound, budget)?)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Enumerate { quiver, q, bound, cache_dir } => {
            let table = build_table(resolve_quiver(&quiver)?, q, bound)?;
            let stem = std::path::Path::new(&quiver).file_stem().and_then(|s| s.to_str()).unwrap_or("quiver").to_string();
            let path = cache::cache_path(&cache::cache_dir(cache_dir.as_deref()), &stem, q, bound);
            match cache::store_or_verify(&path, &table)? {
                cache::CacheStatus::Written => {
                    println!("wrote {} ({} classes)", path.display(), table.len());
                    Ok(0)
                }
                cache::CacheStatus::Unchanged => {
                    println!("{}: verified, unchanged ({} classes)", path.display(), table.len());
                    Ok(0)
                }
                cache::CacheStatus::Differs(diffs) => {
                    println!("{}: cache differs from a fresh enumeration", path.display());
                    for d in diffs {
                        println!("  {}", d);
                    }
                    Ok(1)
                }
            }
        }
        Command::Mult { quiver, q, bound, t, engine, json, lhs, rhs } => {
            mult::run(&mult::MultArgs { quiver, q, bound, t, engine, json, lhs, rhs })
        }
        Command::Verify { suite, q, t, quiver, seed, trials, output, json } => {
            verify::run(&verify::VerifyArgs { suite, q, t, quiver, seed, trials, output, json })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
