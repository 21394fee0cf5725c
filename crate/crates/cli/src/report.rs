//! JSON report shared by every subcommand. Timing never goes in here, so the
//! same inputs always give the same bytes.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// The theorem or construction the check exercises.
    pub anchor: &'static str,
    pub measured: f64,
    pub relation: &'static str,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, anchor: &'static str, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), anchor, measured, relation: "<=", tolerance, pass: measured <= tolerance }
    }

    pub fn above(name: impl Into<String>, anchor: &'static str, measured: f64, bound: f64) -> Self {
        Check { name: name.into(), anchor, measured, relation: ">", tolerance: bound, pass: measured > bound }
    }

    pub fn below(name: impl Into<String>, anchor: &'static str, measured: f64, bound: f64) -> Self {
        Check { name: name.into(), anchor, measured, relation: "<", tolerance: bound, pass: measured < bound }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub anchor: &'static str,
    pub input: Map<String, Value>,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub error: Option<ErrorBody>,
}

impl Report {
    pub fn new(command: &'static str, anchor: &'static str) -> Self {
        Report { command, anchor, input: Map::new(), results: Map::new(), checks: Vec::new(), warnings: Vec::new(), error: None }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.input.insert(key.to_owned(), clean(value));
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_owned(), clean(value));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn set_error(&mut self, e: &CliError) {
        self.error = Some(ErrorBody { kind: e.kind(), message: e.to_string(), exit_code: e.exit_code() });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&clean(self)).expect("report serialises");
        s.push('\n');
        s
    }
}

/// serde_json maps NaN and infinities to `null`.
fn clean(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}
