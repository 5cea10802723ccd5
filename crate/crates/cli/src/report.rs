use std::io::Write;

use invariant_curvature::verify::{CurvatureReport, Verdict};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// One line of a residual table: passes when `value ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualRow {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub version: String,
    pub config: RunConfig,
    pub results: Vec<CurvatureReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Vec<ResidualRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunReport {
    pub fn new(config: RunConfig, results: Vec<CurvatureReport>, residuals: Option<Vec<ResidualRow>>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            results,
            residuals,
            wall_time_ms: None,
        }
    }

    /// No negative witness and every residual within tolerance.
    pub fn passed(&self) -> bool {
        self.results
            .iter()
            .all(|r| r.verdict == Verdict::NonnegativeWithinBudget)
            && self.residuals.iter().flatten().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Columns `t,min_value,verdict`, one row per result.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "min_value", "verdict"])?;
        for r in &self.results {
            let t = r.t.map(|t| t.to_string()).unwrap_or_default();
            let verdict = match r.verdict {
                Verdict::NonnegativeWithinBudget => "NonnegativeWithinBudget",
                Verdict::NegativeWitness => "NegativeWitness",
            };
            w.write_record([t, r.min_value.to_string(), verdict.to_string()])?;
        }
        w.flush().map_err(|e| crate::CliError::Io {
            path: "csv".into(),
            source: e,
        })?;
        Ok(())
    }
}
