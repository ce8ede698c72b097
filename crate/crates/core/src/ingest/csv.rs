//! Single-lead CSV fallback: `sample,mv[,r_peak]`.

use crate::error::{Error, Result};

use super::{
    Annotation, AnnotationSet, Provenance, RecordHeader, SignalRecord, SignalSpec,
};

/// Parse a CSV recording. Samples are taken in row order; rows whose `r_peak`
/// flag is 1 become beat annotations. The record has gain 1 and baseline 0,
/// so its ADC units are millivolts.
pub fn load_csv(
    text: &str,
    record_name: &str,
    sampling_rate: f64,
) -> Result<(SignalRecord, AnnotationSet)> {
    if !(sampling_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling rate must be positive, got {sampling_rate}"
        )));
    }
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Csv {
        line: 1,
        msg: "missing header row".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| columns.iter().position(|c| *c == name);
    let (Some(sample_col), Some(mv_col)) = (find("sample"), find("mv")) else {
        return Err(Error::Csv {
            line: 1,
            msg: format!("header must contain `sample` and `mv`, got `{header}`"),
        });
    };
    let peak_col = find("r_peak");

    let mut samples = Vec::new();
    let mut annotations = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let cell = |col: usize| {
            cells.get(col).copied().ok_or_else(|| Error::Csv {
                line: line_no,
                msg: format!("expected {} columns, got {}", columns.len(), cells.len()),
            })
        };
        let numeric = |col: usize| -> Result<f64> {
            let c = cell(col)?;
            c.parse::<f64>().map_err(|_| Error::Csv {
                line: line_no,
                msg: format!("non-numeric cell `{c}`"),
            })
        };
        numeric(sample_col)?;
        let mv = numeric(mv_col)?;
        if !mv.is_finite() {
            return Err(Error::Csv {
                line: line_no,
                msg: "non-finite sample".into(),
            });
        }
        if let Some(col) = peak_col {
            if numeric(col)? != 0.0 {
                annotations.push(Annotation {
                    sample: samples.len(),
                    code: 1,
                    channel: 0,
                });
            }
        }
        samples.push(mv);
    }
    if samples.is_empty() {
        return Err(Error::Csv {
            line: 2,
            msg: "zero-length record".into(),
        });
    }

    let header = RecordHeader {
        record_name: record_name.to_string(),
        n_signals: 1,
        sampling_rate,
        n_samples: samples.len(),
        signals: vec![SignalSpec {
            file_name: String::new(),
            format_code: 0,
            gain: 1.0,
            baseline: 0,
            description: "csv".into(),
        }],
    };
    let record = SignalRecord::new(header, vec![samples])?;
    let annotations = AnnotationSet::new(annotations, Provenance::Csv)?;
    Ok((record, annotations))
}
