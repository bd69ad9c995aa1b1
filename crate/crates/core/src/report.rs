//! Three-valued check reports shared by the verifier, the convergence checks
//! and the command line.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Unknown,
    Fail,
}

impl Verdict {
    /// Fail dominates Unknown, which dominates Pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Unknown => "UNKNOWN",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(default)]
    pub evidence: serde_json::Value,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> Self {
        Check { name: name.into(), verdict, detail: detail.into(), evidence: serde_json::Value::Null }
    }

    pub fn with_evidence(mut self, evidence: serde_json::Value) -> Self {
        self.evidence = evidence;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub subject: String,
    #[serde(default)]
    pub budgets: serde_json::Value,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub const REPORT_SCHEMA: u32 = 1;

impl Report {
    pub fn new(subject: impl Into<String>, budgets: serde_json::Value) -> Self {
        Report { schema: REPORT_SCHEMA, subject: subject.into(), budgets, checks: Vec::new(), seed: None }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.checks.iter().fold(Verdict::Pass, |v, c| v.combine(c.verdict))
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 pass, 1 fail, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self.verdict() {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unknown => 2,
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.subject, self.verdict())?;
        for c in &self.checks {
            writeln!(f, "  [{}] {}: {}", c.verdict, c.name, c.detail)?;
        }
        Ok(())
    }
}
