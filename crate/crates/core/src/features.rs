//! Per-beat feature tables and their CSV form.
//!
//! A table always starts with `label,ordinal`, followed by the morphological
//! descriptors `Pp..S2` and/or the Hermite coefficients `c0..c{L-1}` plus
//! `residual`. Floats are written in shortest round-trip form.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beats::Heartbeat;
use crate::error::{Error, Result};
use crate::hermite::HermiteBasis;
use crate::morph::{compute_descriptors, DESCRIPTOR_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub morph: bool,
    pub hpe: bool,
}

impl FeatureSelection {
    pub const ALL: Self = Self { morph: true, hpe: true };

    /// Parse `morph`, `hpe`, `all` or a comma list of the first two.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sel = Self { morph: false, hpe: false };
        for part in text.split(',').map(str::trim) {
            match part {
                "morph" => sel.morph = true,
                "hpe" => sel.hpe = true,
                "all" => sel = Self::ALL,
                other => return Err(Error::UnknownGroup(other.to_string())),
            }
        }
        Ok(sel)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub label: String,
    pub ordinal: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureTable {
    /// Feature column names (excluding `label` and `ordinal`).
    pub columns: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

pub fn hpe_column_names(order_count: usize) -> Vec<String> {
    (0..order_count).map(|n| format!("c{n}")).collect()
}

/// Compute the selected features for every beat. Beats flagged `truncated`
/// are skipped unless `keep_truncated`; the number skipped is returned.
pub fn extract_features(
    beats: &[Heartbeat],
    selection: FeatureSelection,
    basis: &HermiteBasis,
    keep_truncated: bool,
) -> Result<(FeatureTable, usize)> {
    let mut columns = Vec::new();
    if selection.morph {
        columns.extend(DESCRIPTOR_NAMES.iter().map(|s| s.to_string()));
    }
    if selection.hpe {
        columns.extend(hpe_column_names(basis.order_count()));
        columns.push("residual".into());
    }
    let kept: Vec<&Heartbeat> = beats.iter().filter(|b| keep_truncated || !b.truncated).collect();
    let skipped = beats.len() - kept.len();

    let rows = kept
        .par_iter()
        .map(|b| {
            let mut values = Vec::with_capacity(columns.len());
            if selection.morph {
                values.extend(compute_descriptors(&b.qs_window, b.sampling_rate)?.to_array());
            }
            if selection.hpe {
                let c = basis.fit(&b.hermite_window)?;
                values.extend(c.coefficients);
                values.push(c.residual_nrmse);
            }
            Ok(FeatureRow {
                label: b.label.clone(),
                ordinal: b.ordinal,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((FeatureTable { columns, rows }, skipped))
}

impl FeatureTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("label,ordinal");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            if row.label.contains([',', '\n', '"']) {
                return Err(Error::InvalidParameter(format!(
                    "label `{}` cannot be written to csv",
                    row.label
                )));
            }
            let _ = write!(out, "{},{}", row.label, row.ordinal);
            for v in &row.values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Csv {
            line: 1,
            msg: "missing header row".into(),
        })?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names.len() < 2 || names[0] != "label" || names[1] != "ordinal" {
            return Err(Error::Csv {
                line: 1,
                msg: "header must start with `label,ordinal`".into(),
            });
        }
        let columns: Vec<String> = names[2..].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let bad = |msg: String| Error::Csv { line: i + 1, msg };
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != names.len() {
                return Err(bad(format!("expected {} cells, got {}", names.len(), cells.len())));
            }
            let ordinal = cells[1]
                .parse()
                .map_err(|_| bad(format!("bad ordinal `{}`", cells[1])))?;
            let values = cells[2..]
                .iter()
                .map(|c| c.parse::<f64>().map_err(|_| bad(format!("non-numeric cell `{c}`"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(FeatureRow {
                label: cells[0].to_string(),
                ordinal,
                values,
            });
        }
        Ok(Self { columns, rows })
    }

    /// Concatenate the columns of two tables describing the same beats.
    pub fn join(&self, other: &FeatureTable) -> Result<FeatureTable> {
        if self.rows.len() != other.rows.len() {
            return Err(Error::InvalidParameter("tables have different row counts".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                if a.label != b.label || a.ordinal != b.ordinal {
                    return Err(Error::InvalidParameter(format!(
                        "row mismatch: {}#{} vs {}#{}",
                        a.label, a.ordinal, b.label, b.ordinal
                    )));
                }
                let mut values = a.values.clone();
                values.extend(&b.values);
                Ok(FeatureRow {
                    label: a.label.clone(),
                    ordinal: a.ordinal,
                    values,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(FeatureTable { columns, rows })
    }
}
