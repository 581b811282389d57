use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Margins below this count as violations.
pub const TOLERANCE: f64 = 1e-9;

/// JSON summary printed by every command except `gen` to stdout.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub timings_ms: BTreeMap<String, f64>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSummary>,
}

/// Result of comparing answers against an oracle or a bound.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckSummary {
    pub checked: usize,
    pub violations: usize,
    /// Smallest observed margin; negative means a violation.
    pub worst_margin: Option<f64>,
}

impl CheckSummary {
    pub fn record(&mut self, margin: f64) {
        self.checked += 1;
        if margin.is_nan() || margin < -TOLERANCE {
            self.violations += 1;
        }
        self.worst_margin = Some(match self.worst_margin {
            Some(w) if !(margin < w) => w,
            _ => margin,
        });
    }
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            parameters: Map::new(),
            timings_ms: BTreeMap::new(),
            results: Value::Null,
            check: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn time(&mut self, key: &str, since: Instant) {
        self.timings_ms
            .insert(key.to_string(), since.elapsed().as_secs_f64() * 1e3);
    }

    pub fn violations(&self) -> usize {
        self.check.as_ref().map_or(0, |c| c.violations)
    }

    /// Writes the report, then turns recorded violations into an error.
    pub fn finish(self, out: Option<&Path>) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&self).expect("report serializes") + "\n";
        match out {
            Some(path) => {
                fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?
            }
            None => write_stdout(&text)?,
        }
        if self.violations() > 0 {
            Err(CliError::Violation(Box::new(self)))
        } else {
            Ok(())
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
pub fn write_stdout(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Usage(format!("cannot write stdout: {e}"))),
        _ => Ok(()),
    }
}
