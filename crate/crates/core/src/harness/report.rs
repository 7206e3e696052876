//! Machine-readable run reports and CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Values recorded without a verdict.
    Diagnostic,
    /// The check could not be evaluated.
    Error,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Diagnostic => "DIAG",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub operation: String,
    pub status: Status,
    /// `None` when the check errored (or the value was not finite).
    pub metric: Option<f64>,
    /// `None` for diagnostics without a threshold.
    pub tolerance: Option<f64>,
    /// SHA-256 of the config digest, seed, id and tolerance.
    pub inputs_digest: String,
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub diagnostic: usize,
    pub error: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    pub target_os: String,
    pub target_arch: String,
    pub float: String,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            target_os: std::env::consts::OS.to_string(),
            target_arch: std::env::consts::ARCH.to_string(),
            float: "f64".to_string(),
        }
    }
}

/// Full run record. Contains no timestamps, so identical inputs give identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub config_digest: String,
    pub environment: Environment,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
    pub skipped: Vec<Skipped>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn summarize(checks: &[CheckRecord]) -> Summary {
        let mut s = Summary::default();
        for c in checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Diagnostic => s.diagnostic += 1,
                Status::Error => s.error += 1,
            }
        }
        s
    }

    /// 0 when nothing failed; 1 on a failed check, or on an errored check under `strict`.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.summary.fail > 0 || (strict && self.summary.error > 0) {
            1
        } else {
            0
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `id,status,metric,tolerance`.
    pub fn checks_csv(&self) -> String {
        let mut out = String::from("id,status,metric,tolerance\n");
        for c in &self.checks {
            let _ = writeln!(out, "{},{},{},{}", c.id, c.label_lower(), fmt_opt(c.metric), fmt_opt(c.tolerance));
        }
        out
    }

    /// `id,key,value` for every auxiliary value.
    pub fn values_csv(&self) -> String {
        let mut out = String::from("id,key,value\n");
        for c in &self.checks {
            for (k, v) in &c.values {
                let _ = writeln!(out, "{},{},{}", c.id, k, fmt_f64(*v));
            }
        }
        out
    }

    /// Writes `report.json` and `tables/{checks,values}.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir.join("tables"))?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("tables").join("checks.csv"), self.checks_csv())?;
        std::fs::write(dir.join("tables").join("values.csv"), self.values_csv())?;
        Ok(())
    }
}

impl CheckRecord {
    fn label_lower(&self) -> &'static str {
        match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Diagnostic => "diagnostic",
            Status::Error => "error",
        }
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}
