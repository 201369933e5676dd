//! JSON report records shared by every verification suite.

use serde::Serialize;
use serde_json::Value;

/// Outcome of a single check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Verdict {
    pub module: String,
    pub operation: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub pass: bool,
    pub counterexample: Option<Value>,
    /// Extra measured quantities, e.g. identified key-bit positions.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Verdict {
    pub fn new(module: &str, operation: &str, parameters: Value) -> Self {
        Verdict {
            module: module.into(),
            operation: operation.into(),
            parameters,
            seed: None,
            pass: true,
            counterexample: None,
            details: Value::Null,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    /// Marks the verdict failed, keeping the first counterexample seen.
    pub fn fail(&mut self, counterexample: Value) {
        self.pass = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(counterexample);
        }
    }
}

/// A named group of verdicts with an overall result.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(command: &str, seed: u64, verdicts: Vec<Verdict>) -> Self {
        Report {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            pass: verdicts.iter().all(|v| v.pass),
            verdicts,
        }
    }
}
