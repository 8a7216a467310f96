//! Verification reports shared by the library checks and the command line.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// One named check, usually aggregating many instances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip)]
    instances: u64,
    #[serde(skip)]
    failures: u64,
}

// The running counters are not serialized; `finish` records them as parameters.
impl PartialEq for Check {
    fn eq(&self, o: &Check) -> bool {
        self.name == o.name && self.params == o.params && self.status == o.status && self.witness == o.witness
    }
}

impl Eq for Check {}

impl Check {
    pub fn new(name: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            params: BTreeMap::new(),
            status: Status::Pass,
            witness: None,
            instances: 0,
            failures: 0,
        }
    }

    /// A check with a single verdict.
    pub fn single(name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Check {
        let mut c = Check::new(name);
        c.record(ok, witness);
        c.finish()
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Check {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Records one instance; the first failing witness is kept.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            self.status = Status::Fail;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    /// Folds a nested report into this check.
    pub fn absorb(&mut self, r: &Report) {
        for c in &r.checks {
            self.record(c.status == Status::Pass, || {
                format!("{}: {}", c.name, c.witness.clone().unwrap_or_default())
            });
        }
    }

    pub fn finish(mut self) -> Check {
        self.params.insert("instances".into(), self.instances.to_string());
        if self.failures > 0 {
            self.params.insert("failures".into(), self.failures.to_string());
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: impl Into<String>, checks: Vec<Check>) -> Report {
        let mut r = Report {
            suite: suite.into(),
            params: BTreeMap::new(),
            checks,
            summary: Summary::default(),
        };
        r.tally();
        r
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Report {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
        self.tally();
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.tally();
    }

    fn tally(&mut self) {
        let fail = self.checks.iter().filter(|c| !c.passed()).count();
        self.summary = Summary { pass: self.checks.len() - fail, fail };
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// Flattens several reports into one. Each check keeps its own parameters,
    /// gains a `section` naming its report, and inherits that report's
    /// parameters where it does not set them itself.
    pub fn merged(suite: impl Into<String>, parts: &[Report]) -> Report {
        let mut checks = Vec::new();
        for r in parts {
            for c in &r.checks {
                let mut c = c.clone();
                for (k, v) in &r.params {
                    c.params.entry(k.clone()).or_insert_with(|| v.clone());
                }
                c.params.insert("section".into(), r.suite.clone());
                checks.push(c);
            }
        }
        Report::new(suite, checks)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(f, "suite {} [{}]", self.suite, params.join(" "))?;
        for c in &self.checks {
            let ps: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "  {} {} ({})", c.status, c.name, ps.join(" "))?;
            if let Some(w) = &c.witness {
                write!(f, " witness: {w}")?;
            }
            writeln!(f)?;
        }
        write!(f, "  summary: {} passed, {} failed", self.summary.pass, self.summary.fail)
    }
}
