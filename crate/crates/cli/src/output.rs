use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::{Format, Global};

/// Invalid user input detected by the front end (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 2 for invalid input, 3 for numerical non-convergence, 1 otherwise.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<spans_core::Error>() {
        return match core {
            spans_core::Error::NonConvergence(_) => 3,
            _ => 2,
        };
    }
    if e.downcast_ref::<UsageError>().is_some() {
        2
    } else {
        1
    }
}

#[derive(Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub results: Value,
    pub runtime_seconds: f64,
    pub version: &'static str,
}

/// What a command produced, in each of its output forms.
pub struct Outcome {
    pub results: Value,
    pub csv: Option<String>,
    pub plain: Option<String>,
    pub converged: bool,
}

impl Outcome {
    pub fn new(results: impl Serialize) -> Result<Self> {
        Ok(Self { results: serde_json::to_value(results)?, csv: None, plain: None, converged: true })
    }

    pub fn csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn plain(mut self, plain: String) -> Self {
        self.plain = Some(plain);
        self
    }

    pub fn converged(mut self, ok: bool) -> Self {
        self.converged = ok;
        self
    }
}

pub fn emit(global: &Global, command: &str, parameters: Value, outcome: Outcome, start: Instant) -> Result<ExitCode> {
    let text = match (global.format, outcome.plain) {
        (Some(Format::Csv), _) => outcome.csv.ok_or_else(|| usage(format!("`{command}` has no CSV form")))?,
        (None, Some(plain)) => plain,
        _ => {
            let report = ExperimentReport {
                command: command.to_string(),
                parameters,
                seed: global.seed,
                results: outcome.results,
                runtime_seconds: start.elapsed().as_secs_f64(),
                version: env!("CARGO_PKG_VERSION"),
            };
            serde_json::to_string_pretty(&report)?
        }
    };
    let text = text.trim_end_matches('\n');
    match &global.out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?,
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    if outcome.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("warning: quadrature did not reach the requested tolerance");
        Ok(ExitCode::from(3))
    }
}

/// `header` followed by one comma-separated line per row.
pub fn csv_table<R: IntoIterator<Item = String>>(header: &str, rows: R) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}
