//! Command-line entry points: `run`, `converge`, `list-checks`, `schema`.
//!
//! Exit codes: 0 all checks pass, 1 a check failed (or errored under
//! `--strict`), 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twophase::harness::{config_schema, convergence_study, list_checks, run_scenario, Axis, RunOptions, ScenarioConfig};
use twophase::Error;

#[derive(Parser)]
#[command(name = "twophase", version, about = "Verification checks for two-phase flow with surface tension")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every enabled check of a scenario and write report.json plus CSV tables.
    Run {
        config: PathBuf,
        /// Treat errored checks as failures.
        #[arg(long)]
        strict: bool,
        /// Output directory (default: out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Refine one resolution axis and report observed orders.
    Converge {
        config: PathBuf,
        /// grid_h, surface_M, time_dt or mfs_sources.
        #[arg(long)]
        axis: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the check catalog.
    ListChecks {
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Print the JSON schema of scenario configs.
    Schema,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } | Error::Io(_) | Error::Json(_) | Error::UnknownCheck(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn load(path: &PathBuf) -> Result<ScenarioConfig, Error> {
    ScenarioConfig::from_path(path)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, strict, out, seed } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let report = match run_scenario(cfg, &RunOptions { seed }) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            for c in &report.checks {
                let metric = c.metric.map_or("-".into(), |m| format!("{m:.3e}"));
                let tol = c.tolerance.map_or("-".into(), |t| format!("{t:.1e}"));
                println!("{:<5} {:<34} {:>10} (tol {})", c.status.label(), c.id, metric, tol);
                if let Some(m) = &c.message {
                    println!("      {m}");
                }
            }
            let s = &report.summary;
            println!(
                "{}: {} pass, {} fail, {} diagnostic, {} error, {} skipped",
                report.scenario,
                s.pass,
                s.fail,
                s.diagnostic,
                s.error,
                report.skipped.len()
            );
            if let Err(e) = report.write(&dir) {
                return fail(&e);
            }
            println!("report written to {}", dir.join("report.json").display());
            let code = report.exit_code(strict);
            if code != 0 {
                let bad: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| c.status == twophase::harness::Status::Fail || (strict && c.status == twophase::harness::Status::Error))
                    .map(|c| c.id.as_str())
                    .collect();
                eprintln!("failing checks: {}", bad.join(", "));
            }
            ExitCode::from(code as u8)
        }
        Command::Converge { config, axis, levels, out, seed } => {
            let axis: Axis = match axis.parse() {
                Ok(a) => a,
                Err(e) => return fail(&e),
            };
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let report = match convergence_study(cfg, axis, levels, seed) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            for s in &report.series {
                let order = s.observed_order.map_or("n/a".into(), |p| format!("{p:.2}"));
                let errs: Vec<String> = s.error.iter().map(|e| format!("{e:.2e}")).collect();
                let mut flags = String::new();
                if s.non_monotone {
                    flags.push_str(" [non-monotone]");
                }
                if s.reached_roundoff {
                    flags.push_str(" [round-off]");
                }
                println!("{:<30} order {:>6}  errors [{}]{}", s.check, order, errs.join(", "), flags);
            }
            if let Err(e) = report.write(&dir) {
                return fail(&e);
            }
            ExitCode::SUCCESS
        }
        Command::ListChecks { json } => {
            let entries = list_checks();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
            } else {
                for e in entries {
                    println!("{:<34} {}", e.id, e.anchor);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Schema => {
            println!("{}", serde_json::to_string_pretty(&config_schema()).expect("schema serializes"));
            ExitCode::SUCCESS
        }
    }
}
