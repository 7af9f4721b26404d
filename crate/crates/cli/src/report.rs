//! JSON-lines / CSV report sink.
//!
//! One line per check. `pass` is always `residual <= tolerance`; checks that
//! are naturally lower-bounded (convergence ratios, gradient floors) are
//! reported as shortfalls so that the same predicate applies.
//!
//! Reports are byte-reproducible for a fixed (command, seed): `wall_time_ms`
//! stays 0 unless `--timing` is given, and all sample loops are seeded per
//! index, so thread count does not affect the output.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Serialize)]
pub struct ReportLine {
    pub schema_version: &'static str,
    pub space: String,
    pub params: serde_json::Value,
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: u64,
    pub seed: u64,
    pub engine: String,
    pub wall_time_ms: u64,
}

pub struct Sink {
    jsonl: Option<PathBuf>,
    csv: Option<PathBuf>,
    csv_header_written: bool,
    pub any_fail: bool,
    pub lines: Vec<ReportLine>,
}

impl Sink {
    pub fn new(jsonl: Option<PathBuf>, csv: Option<PathBuf>) -> Self {
        Self {
            jsonl,
            csv,
            csv_header_written: false,
            any_fail: false,
            lines: Vec::new(),
        }
    }

    pub fn emit(&mut self, line: ReportLine) -> Result<()> {
        if !line.pass {
            self.any_fail = true;
        }
        if let Some(path) = &self.jsonl {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            let serialized = serde_json::to_string(&line)?;
            writeln!(f, "{serialized}")?;
        }
        if let Some(path) = &self.csv {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            if !self.csv_header_written {
                if f.metadata()?.len() == 0 {
                    writeln!(
                        f,
                        "schema_version,space,params,check,residual,tolerance,pass,samples,seed,engine,wall_time_ms"
                    )?;
                }
                self.csv_header_written = true;
            }
            writeln!(
                f,
                "{},{},{:?},{},{},{},{},{},{},{},{}",
                line.schema_version,
                line.space,
                serde_json::to_string(&line.params)?,
                line.check,
                line.residual,
                line.tolerance,
                line.pass,
                line.samples,
                line.seed,
                line.engine,
                line.wall_time_ms
            )?;
        }
        self.lines.push(line);
        Ok(())
    }
}
