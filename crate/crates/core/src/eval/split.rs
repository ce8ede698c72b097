use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureRow;

/// Row indices of the training and test sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per subject, the first `ceil(n * train_fraction)` beats in time order train
/// and the rest test. Subjects come out in label order.
pub fn chronological_split(rows: &[FeatureRow], train_fraction: f64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut by_subject: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        by_subject.entry(r.label.as_str()).or_default().push(i);
    }
    let mut split = Split {
        train: Vec::new(),
        test: Vec::new(),
    };
    for (label, mut idx) in by_subject {
        if idx.len() < 3 {
            return Err(Error::InvalidTrainingData(format!(
                "subject {label} has {} beats, need at least 3",
                idx.len()
            )));
        }
        idx.sort_by_key(|&i| rows[i].ordinal);
        let n_train = ((idx.len() as f64 * train_fraction) - 1e-9).ceil() as usize;
        let n_train = n_train.clamp(1, idx.len() - 1);
        split.train.extend(&idx[..n_train]);
        split.test.extend(&idx[n_train..]);
    }
    Ok(split)
}
