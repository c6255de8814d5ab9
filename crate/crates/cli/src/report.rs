use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Exploratory,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass | Outcome::Exploratory => 0,
            Outcome::Fail => 1,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Exploratory => "exploratory",
        })
    }
}

/// Run-dependent details kept apart from the reproducible part of a report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub workers: usize,
}

/// Result of one command. Every number is a decimal string; rationals are
/// written `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub outcome: Outcome,
    pub values: BTreeMap<String, String>,
    pub regime: Option<String>,
    /// Names of violated invariants; non-empty exactly when the outcome is fail.
    pub violations: Vec<String>,
    pub artifacts: Vec<String>,
    /// Primary text output (CSV table, family file, matching listing).
    pub output: Option<String>,
    pub sidecar: Sidecar,
    pub runtime_ms: u64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            params: BTreeMap::new(),
            outcome: Outcome::Pass,
            values: BTreeMap::new(),
            regime: None,
            violations: Vec::new(),
            artifacts: Vec::new(),
            output: None,
            sidecar: Sidecar::default(),
            runtime_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn value(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn violation(&mut self, name: impl Into<String>) {
        self.violations.push(name.into());
    }

    /// Sets the outcome to fail if any violation was recorded, else to `ok`.
    pub fn settle(&mut self, ok: Outcome) {
        self.outcome = if self.violations.is_empty() { ok } else { Outcome::Fail };
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without `runtime_ms` and `sidecar`; identical for identical runs.
    pub fn stable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let obj = v.as_object_mut().expect("report is an object");
        obj.remove("runtime_ms");
        obj.remove("sidecar");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// Human-readable summary (without the primary output).
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {}", self.command, self.outcome);
        if let Some(r) = &self.regime {
            let _ = writeln!(s, "  regime: {r}");
        }
        for (k, v) in &self.values {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for v in &self.violations {
            let _ = writeln!(s, "  violated: {v}");
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "  wrote {a}");
        }
        let _ = writeln!(s, "  ({} ms)", self.runtime_ms);
        s
    }
}
