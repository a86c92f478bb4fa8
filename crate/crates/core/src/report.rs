//! Serializable verification records.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Outcome of one identity checked over a range of blocks.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdentityRecord {
    pub law: String,
    pub blocks_checked: usize,
    pub holds: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Ledger {
    pub records: Vec<IdentityRecord>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `law` as holding unless `outcome` carries an error.
    pub fn record(&mut self, law: &str, blocks_checked: usize, outcome: Result<()>) {
        let failure = outcome.err().map(|e| e.to_string());
        self.records.push(IdentityRecord { law: law.to_string(), blocks_checked, holds: failure.is_none(), failure });
    }

    pub fn extend(&mut self, other: Ledger) {
        self.records.extend(other.records);
    }

    pub fn all_hold(&self) -> bool {
        self.records.iter().all(|r| r.holds)
    }

    pub fn first_failure(&self) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| !r.holds)
    }

    /// Converts the first failing record into an error.
    pub fn into_result(self) -> Result<Ledger> {
        if let Some(r) = self.first_failure() {
            return Err(Error::IdentityViolation { law: r.law.clone(), block: r.failure.clone().unwrap_or_default() });
        }
        Ok(self)
    }
}

/// A named, self-describing verification result.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub name: String,
    pub algebra: String,
    pub passed: bool,
    pub details: Value,
    pub ledger: Ledger,
}

impl Certificate {
    pub fn new(name: &str, algebra: &str, details: Value, ledger: Ledger) -> Self {
        let passed = ledger.all_hold();
        Certificate { name: name.to_string(), algebra: algebra.to_string(), passed, details, ledger }
    }

    /// A certificate for a computation that could not be carried out.
    pub fn failed(name: &str, algebra: &str, err: &Error) -> Self {
        let mut ledger = Ledger::new();
        ledger.record(name, 0, Err(err.clone()));
        Certificate::new(name, algebra, Value::Null, ledger)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("[{}] {} on {}\n", if self.passed { "PASS" } else { "FAIL" }, self.name, self.algebra);
        for r in &self.ledger.records {
            s.push_str(&format!(
                "  {} {} ({} blocks){}\n",
                if r.holds { "ok  " } else { "FAIL" },
                r.law,
                r.blocks_checked,
                r.failure.as_ref().map(|f| format!(": {f}")).unwrap_or_default()
            ));
        }
        if !self.details.is_null() {
            s.push_str(&format!("  details: {}\n", self.details));
        }
        s
    }
}
