//! Verification reports: versioned JSON plus a plain-text rendering.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::verify::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// One named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub expected: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(suite: &str, name: &str, passed: bool, measured: f64, expected: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            passed,
            measured,
            expected: expected.into(),
            detail: None,
        }
    }

    pub fn below(suite: &str, name: &str, measured: f64, bound: f64) -> Self {
        Self::new(suite, name, measured < bound, measured, format!("< {bound:e}"))
    }

    pub fn within(suite: &str, name: &str, measured: f64, target: f64, tol: f64) -> Self {
        Self::new(
            suite,
            name,
            (measured - target).abs() <= tol,
            measured,
            format!("{target} ± {tol:e}"),
        )
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Failing check carrying an error message.
    pub fn errored(suite: &str, name: &str, err: impl std::fmt::Display) -> Self {
        Self::new(suite, name, false, f64::NAN, "no error").with_detail(err.to_string())
    }
}

/// Result of one `verify` invocation.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall-clock milliseconds per suite; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(config: &RunConfig, checks: Vec<Check>, timings: BTreeMap<String, f64>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { schema: SCHEMA_VERSION, suite: config.suite.clone(), config: config.clone(), passed, checks, timings }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The JSON value with `timings` removed.
    pub fn deterministic_json(&self) -> Result<serde_json::Value> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
        }
        Ok(v)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("suite {}: {}\n", self.suite, if self.passed { "PASS" } else { "FAIL" });
        for c in &self.checks {
            s.push_str(&format!(
                "{} {}/{}: measured {:e}, expected {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.measured,
                c.expected
            ));
            if let Some(d) = &c.detail {
                s.push_str(&format!(" ({d})"));
            }
            s.push('\n');
        }
        for (k, ms) in &self.timings {
            s.push_str(&format!("time {k}: {ms:.1} ms\n"));
        }
        s
    }

    /// Writes `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        std::fs::write(dir.join("report.txt"), self.to_text())?;
        Ok(())
    }
}
