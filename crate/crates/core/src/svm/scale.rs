use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How standardized features are scaled before entering the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// Plain z-scores.
    ZScore,
    /// z-scores divided by the square root of the retained feature count, so
    /// squared distances stay O(1) whatever the feature-group size.
    #[default]
    ZScorePerDimension,
}

/// Per-feature mean and population standard deviation from training rows.
/// Zero-variance features are masked out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub retained: Vec<bool>,
    pub scaling: Scaling,
}

pub fn fit_standardization(rows: &[Vec<f64>], scaling: Scaling) -> Result<Standardization> {
    let first = rows
        .first()
        .ok_or_else(|| Error::InvalidTrainingData("no rows to standardize".into()))?;
    let dim = first.len();
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: r.len(),
        });
    }
    let n = rows.len() as f64;
    let mut means = vec![0.0; dim];
    for r in rows {
        for (m, v) in means.iter_mut().zip(r) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut stds = vec![0.0; dim];
    for r in rows {
        for ((s, v), m) in stds.iter_mut().zip(r).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
    let retained = stds
        .iter()
        .zip(&means)
        .map(|(&s, &m)| s > 1e-12 * m.abs().max(1.0))
        .collect();
    Ok(Standardization {
        means,
        stds,
        retained,
        scaling,
    })
}

impl Standardization {
    pub fn input_dim(&self) -> usize {
        self.means.len()
    }

    pub fn retained_count(&self) -> usize {
        self.retained.iter().filter(|&&r| r).count()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let factor = match self.scaling {
            Scaling::ZScore => 1.0,
            Scaling::ZScorePerDimension => 1.0 / (self.retained_count().max(1) as f64).sqrt(),
        };
        Ok(x.iter()
            .enumerate()
            .filter(|&(k, _)| self.retained[k])
            .map(|(k, v)| (v - self.means[k]) / self.stds[k] * factor)
            .collect())
    }
}
