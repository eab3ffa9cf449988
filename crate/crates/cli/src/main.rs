use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockdeform_cli::{emit_report, run_suite, ConfigError, Relation, SuiteConfig};

#[derive(Parser)]
#[command(name = "fockdeform", version, about = "Numerical checks for deformed free fields on a truncated Fock space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and print one line per check.
    Verify {
        /// JSON config file; built-in defaults are used for missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Restrict to the named suite (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Leave the wall-clock runtime out of the report.
        #[arg(long)]
        omit_runtime: bool,
    },
    /// Print the built-in config as JSON.
    DefaultConfig,
}

fn load(
    config: Option<PathBuf>,
    suites: Vec<String>,
    tolerance: Option<f64>,
    seed: Option<u64>,
) -> Result<SuiteConfig, ConfigError> {
    let mut cfg = match config {
        Some(path) => SuiteConfig::load(&path)?,
        None => SuiteConfig::default(),
    };
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    if let Some(tol) = tolerance {
        cfg.tolerance = tol;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::DefaultConfig => {
            println!("{}", serde_json::to_string_pretty(&SuiteConfig::default()).expect("config serializes"));
            ExitCode::SUCCESS
        }
        Command::Verify { config, suites, tolerance, seed, report, omit_runtime } => {
            let cfg = match load(config, suites, tolerance, seed) {
                Ok(cfg) => cfg,
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(2);
                }
            };
            let mut result = match run_suite(&cfg) {
                Ok(result) => result,
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::from(2);
                }
            };
            if omit_runtime {
                result.runtime_seconds = None;
            }
            for r in &result.records {
                let status = if r.pass { "PASS" } else { "FAIL" };
                let op = match r.relation {
                    Relation::AtMost => "<=",
                    Relation::Exceeds => ">",
                };
                let dev = match (r.max_deviation, &r.error) {
                    (_, Some(err)) => format!("error: {err}"),
                    (Some(d), None) => format!("{d:.3e}"),
                    (None, None) => "n/a".into(),
                };
                println!("{status} {}/{} [{}] {dev} {op} {:.1e}", r.suite, r.check, r.anchor, r.tolerance);
            }
            let failed = result.failures().count();
            println!("{} checks, {} failed", result.records.len(), failed);
            if let Some(path) = report {
                if let Err(err) = emit_report(&result, &path) {
                    eprintln!("error: cannot write report {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            }
            if result.overall_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
