//! Machine-readable suite reports.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Error;
use crate::sampling;

pub const SCHEMA: &str = "isopar-report/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detail {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    /// The identity the residual measures.
    pub identity: String,
}

impl Detail {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, identity: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            identity: identity.into(),
        }
    }

    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub generator: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub pass: bool,
    pub details: Vec<Detail>,
    pub stats: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SuiteReport {
    pub fn new(command: impl Into<String>, seed: u64, samples: usize) -> Self {
        Self {
            schema: SCHEMA,
            command: command.into(),
            params: BTreeMap::new(),
            seed,
            generator: sampling::GENERATOR,
            samples,
            max_residual: 0.0,
            pass: true,
            details: Vec::new(),
            stats: BTreeMap::new(),
            error: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn push(&mut self, detail: Detail) {
        self.pass &= detail.passed();
        if detail.residual.is_nan() {
            self.max_residual = f64::NAN;
        } else if !self.max_residual.is_nan() {
            self.max_residual = self.max_residual.max(detail.residual);
        }
        self.details.push(detail);
    }

    pub fn stat(&mut self, key: impl Into<String>, value: f64) {
        self.stats.insert(key.into(), value);
    }

    /// Marks the run as aborted; the details gathered so far are kept.
    pub fn fail_with(&mut self, err: &Error) {
        self.pass = false;
        self.error = Some(err.to_string());
    }

    /// 0 when every check passed, 1 when one failed, 2 when the run aborted.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.pass {
            0
        } else {
            1
        }
    }
}
