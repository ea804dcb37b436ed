use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::diagnostics::Check;
use crate::verifier::AssocReport;

use super::config::JobConfig;
use super::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub check: String,
    pub at: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarJson {
    pub a: String,
    pub b: String,
    #[serde(rename = "F")]
    pub f: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionSummary {
    pub hbar_order: u32,
    pub weyl_degree: u32,
    pub iterations: usize,
    pub r_terms: usize,
}

/// Machine-readable outcome of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<JobConfig>,
    pub pass: bool,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<Residual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jet_guard: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<StarJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub associativity: Option<AssocReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub dump: BTreeMap<String, String>,
    /// Wall-clock milliseconds per phase; present only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            tool: "fedosov".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: None,
            pass: false,
            exit_code: 0,
            error: None,
            checks: Vec::new(),
            residuals: Vec::new(),
            seed: None,
            jet_guard: None,
            connection: None,
            star: None,
            associativity: None,
            dump: BTreeMap::new(),
            timing: None,
        }
    }

    /// Clears everything a retried attempt recomputes.
    pub(crate) fn reset_results(&mut self) {
        self.checks.clear();
        self.residuals.clear();
        self.connection = None;
        self.star = None;
        self.associativity = None;
        self.dump.clear();
    }

    pub fn finish(mut self, outcome: Result<(), CliError>) -> Self {
        match outcome {
            Ok(()) => {
                if let Some(c) = self.checks.iter().find(|c| !c.pass) {
                    self.exit_code = if is_undetermined(c) { 3 } else { 1 };
                    self.error = Some(format!("{}: {}", c.name, c.detail));
                } else {
                    self.exit_code = 0;
                }
            }
            Err(e) => {
                self.exit_code = e.exit_code();
                if let CliError::Invariant(c) | CliError::Undetermined(c) = &e {
                    if !self.checks.iter().any(|k| k.name == c.name && !k.pass) {
                        self.checks.push(c.clone());
                    }
                }
                self.error = Some(e.to_string());
            }
        }
        self.pass = self.exit_code == 0;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn is_undetermined(c: &Check) -> bool {
    !c.pass && c.detail.contains("increase jet_guard")
}

/// Phase timer that records nothing unless enabled.
pub(crate) struct Timer {
    start: Option<Instant>,
    phases: BTreeMap<String, f64>,
}

impl Timer {
    pub fn new(enabled: bool) -> Self {
        Timer {
            start: enabled.then(Instant::now),
            phases: BTreeMap::new(),
        }
    }

    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let Some(_) = self.start else { return f() };
        let t = Instant::now();
        let out = f();
        let ms = t.elapsed().as_secs_f64() * 1e3;
        *self.phases.entry(phase.into()).or_insert(0.0) += ms;
        out
    }

    pub fn finish(mut self) -> Option<BTreeMap<String, f64>> {
        let start = self.start?;
        self.phases
            .insert("total".into(), start.elapsed().as_secs_f64() * 1e3);
        Some(self.phases)
    }
}
