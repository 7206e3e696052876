//! Executes the enabled checks of a scenario and assembles the report.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use super::catalog::{catalog, Applicability, CheckDef};
use super::config::ScenarioConfig;
use super::report::{sha256_hex, CheckRecord, Environment, Report, Skipped, Status, REPORT_SCHEMA_VERSION};
use super::scenario::{stream_rng, Scenario};
use crate::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the config seed.
    pub seed: Option<u64>,
}

/// A selected check and how its outcome is judged.
struct Planned {
    def: &'static CheckDef,
    diagnostic: bool,
    tolerance: f64,
}

fn plan(s: &Scenario) -> Result<(Vec<Planned>, Vec<Skipped>)> {
    let sel = &s.config.checks;
    let explicit = sel.enabled.is_some();
    let chosen: Vec<(usize, &'static CheckDef)> = match &sel.enabled {
        Some(ids) => ids
            .iter()
            .enumerate()
            .map(|(i, id)| {
                super::catalog::find(id)
                    .map(|d| (i, d))
                    .ok_or_else(|| Error::Config { path: format!("/checks/enabled/{i}"), message: format!("unknown check id `{id}`") })
            })
            .collect::<Result<_>>()?,
        None => catalog().iter().enumerate().collect(),
    };
    let mut planned = Vec::new();
    let mut skipped = Vec::new();
    for (i, def) in chosen {
        let forced = sel.diagnostic.iter().any(|d| d == def.id);
        let diagnostic = match (def.applies)(s) {
            Applicability::NotApplicable(reason) if explicit => {
                return Err(Error::Config {
                    path: format!("/checks/enabled/{i}"),
                    message: format!("check `{}` does not apply: {reason}", def.id),
                })
            }
            Applicability::NotApplicable(reason) => {
                skipped.push(Skipped { id: def.id.to_string(), reason: reason.to_string() });
                continue;
            }
            Applicability::Diagnostic(_) => true,
            Applicability::Applies => forced,
        };
        let tolerance = sel.tolerances.get(def.id).copied().unwrap_or(def.tolerance);
        planned.push(Planned { def, diagnostic, tolerance });
    }
    Ok((planned, skipped))
}

fn evaluate(s: &Scenario, p: &Planned, config_digest: &str) -> CheckRecord {
    let def = p.def;
    let digest_input = format!("{config_digest}|{}|{}|{:e}", s.seed, def.id, p.tolerance);
    let mut rng = stream_rng(s.seed, def.id);
    let result = catch_unwind(AssertUnwindSafe(|| (def.run)(s, &mut rng)))
        .unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|m| m.to_string()))
                .unwrap_or_else(|| "check panicked".into());
            Err(Error::Unsupported(msg))
        });
    let tolerance = p.tolerance.is_finite().then_some(p.tolerance);
    let mut record = CheckRecord {
        id: def.id.to_string(),
        anchor: def.anchor.to_string(),
        operation: def.operation.to_string(),
        status: Status::Error,
        metric: None,
        tolerance,
        inputs_digest: sha256_hex(digest_input.as_bytes()),
        values: Default::default(),
        message: None,
    };
    match result {
        Err(e) => record.message = Some(e.to_string()),
        Ok(out) => {
            record.metric = out.metric.is_finite().then_some(out.metric);
            record.values = out.values.into_iter().filter(|(_, v)| v.is_finite()).collect();
            record.status = if p.diagnostic {
                record.message = out.violation;
                Status::Diagnostic
            } else if let Some(v) = out.violation {
                record.message = Some(v);
                Status::Fail
            } else if out.metric.is_finite() && out.metric <= p.tolerance {
                Status::Pass
            } else {
                record.message = Some(format!("metric {:e} exceeds tolerance {:e}", out.metric, p.tolerance));
                Status::Fail
            };
        }
    }
    record
}

/// Runs every enabled check. Failures and errors are recorded, not raised;
/// only configuration problems return `Err`.
pub fn run_scenario(config: ScenarioConfig, opts: &RunOptions) -> Result<Report> {
    let config_digest = sha256_hex(config.canonical_json().as_bytes());
    let scenario = Scenario::build(config, opts.seed)?;
    let (planned, skipped) = plan(&scenario)?;
    // results come back in catalog order whatever the scheduling
    let checks: Vec<CheckRecord> = planned.par_iter().map(|p| evaluate(&scenario, p, &config_digest)).collect();
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: scenario.config.name.clone(),
        seed: scenario.seed,
        config_digest,
        environment: Environment::current(),
        summary: Report::summarize(&checks),
        checks,
        skipped,
    })
}
