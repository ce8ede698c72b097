//! Evaluation protocol: chronological split, feature groups, hyperparameter
//! grid and the per-group identification-rate table.
//!
//! # Report document (`format_version` 1)
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "seed": 7 | null,               // synthetic data seed, if any
//!   "train_fraction": 0.666…,
//!   "excluded": { "truncated": n, "degenerate": n },
//!   "grid": { "selection": "on-test" | "inner-validation",
//!             "best": EvalRow, "rows": [EvalRow, …] },
//!   "table2": [ { "feature_group", "published_rate", "reproduced": EvalRow, "delta" }, … ] | null
//! }
//! ```
//!
//! An `EvalRow` carries the group, kernel, `c`, `global_rate`,
//! `subject_vote_rate`, `labels`, `confusion[true][predicted]`, and the train
//! and test beat counts.

mod experiment;
mod groups;
mod split;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use experiment::{
    grid_search, rate_from_confusion, run_experiment, table2_report, EvalRow, ExperimentOptions, Grid, GridResult,
    Selection, Table2Row,
};
pub use groups::{table2_rows, BaseGroup, FeatureGroup};
pub use split::{chronological_split, Split};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExcludedCounts {
    pub truncated: usize,
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub seed: Option<u64>,
    pub train_fraction: f64,
    pub excluded: ExcludedCounts,
    pub grid: GridResult,
    pub table2: Option<Vec<Table2Row>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(Error::Config(format!("unknown report format `{s}`"))),
        }
    }
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.format_version != REPORT_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported report format version {}",
                report.format_version
            )));
        }
        Ok(report)
    }

    /// Render the grid and, when present, the rate table.
    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Csv => {
                out.push_str("section,feature_group,kernel,c,global_rate,subject_vote_rate,published_rate,delta\n");
                for r in &self.grid.rows {
                    let _ = writeln!(
                        out,
                        "grid,{},{},{},{:.2},{:.2},,",
                        r.feature_group, r.kernel, r.c, r.global_rate, r.subject_vote_rate
                    );
                }
                for t in self.table2.iter().flatten() {
                    let r = &t.reproduced;
                    let _ = writeln!(
                        out,
                        "table2,{},{},{},{:.2},{:.2},{:.2},{:+.2}",
                        t.feature_group, r.kernel, r.c, r.global_rate, r.subject_vote_rate, t.published_rate, t.delta
                    );
                }
            }
            ReportFormat::Markdown => {
                let b = &self.grid.best;
                let _ = writeln!(
                    out,
                    "Best: group `{}`, {}, C = {}: {:.2}% of {} test beats\n",
                    b.feature_group, b.kernel, b.c, b.global_rate, b.n_test
                );
                out.push_str("| group | kernel | C | rate (%) | subject vote (%) |\n|---|---|---|---|---|\n");
                for r in &self.grid.rows {
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {:.2} | {:.2} |",
                        r.feature_group, r.kernel, r.c, r.global_rate, r.subject_vote_rate
                    );
                }
                if let Some(rows) = &self.table2 {
                    out.push_str("\n| feature group | reproduced (%) | published (%) | delta |\n|---|---|---|---|\n");
                    for t in rows {
                        let _ = writeln!(
                            out,
                            "| {} | {:.2} | {:.2} | {:+.2} |",
                            t.feature_group, t.reproduced.global_rate, t.published_rate, t.delta
                        );
                    }
                }
            }
        }
        out
    }
}
