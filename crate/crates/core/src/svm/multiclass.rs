use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_standardization, train_binary, BinarySvmModel, Kernel, Scaling, Standardization, TrainConfig};
use crate::error::{Error, Result};

/// Version of the serialized model document.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MulticlassScheme {
    #[default]
    OneVsOne,
    OneVsRest,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MulticlassOptions {
    pub scheme: MulticlassScheme,
    pub scaling: Scaling,
}

/// Binary sub-model: positive class `positive`, negative class `negative`
/// (indices into the label list). One-vs-rest models have no negative label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub positive: usize,
    pub negative: Option<usize>,
    pub model: BinarySvmModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    pub format_version: u32,
    /// Class labels in sorted order.
    pub labels: Vec<String>,
    pub scheme: MulticlassScheme,
    pub feature_group: String,
    pub feature_names: Vec<String>,
    pub standardization: Standardization,
    pub kernel: Kernel,
    pub config: TrainConfig,
    pub pairwise: Vec<PairModel>,
}

fn binary_subproblem(
    rows: &[Vec<f64>],
    classes: &[usize],
    positive: usize,
    negative: Option<usize>,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (row, &c) in rows.iter().zip(classes) {
        if c == positive {
            x.push(row.clone());
            y.push(1.0);
        } else if negative.is_none_or(|n| n == c) {
            x.push(row.clone());
            y.push(-1.0);
        }
    }
    (x, y)
}

/// Train a multiclass model. `x` holds raw (unstandardized) feature rows.
pub fn train_multiclass(
    x: &[Vec<f64>],
    labels: &[String],
    kernel: &Kernel,
    config: &TrainConfig,
    options: MulticlassOptions,
) -> Result<MulticlassModel> {
    if x.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: labels.len(),
        });
    }
    kernel.validate()?;
    config.validate()?;
    let label_set: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if label_set.len() < 2 {
        return Err(Error::InvalidTrainingData(format!(
            "need at least 2 distinct labels, got {}",
            label_set.len()
        )));
    }
    let classes: Vec<usize> = labels
        .iter()
        .map(|l| label_set.binary_search(l).expect("label in set"))
        .collect();

    let standardization = fit_standardization(x, options.scaling)?;
    let z = x
        .iter()
        .map(|r| standardization.apply(r))
        .collect::<Result<Vec<_>>>()?;

    let k = label_set.len();
    let jobs: Vec<(usize, Option<usize>)> = match options.scheme {
        MulticlassScheme::OneVsOne => (0..k)
            .flat_map(|a| (a + 1..k).map(move |b| (a, Some(b))))
            .collect(),
        MulticlassScheme::OneVsRest => (0..k).map(|a| (a, None)).collect(),
    };
    let pairwise = jobs
        .into_par_iter()
        .map(|(positive, negative)| {
            let (px, py) = binary_subproblem(&z, &classes, positive, negative);
            let model = train_binary(&px, &py, kernel, config)?;
            Ok(PairModel {
                positive,
                negative,
                model,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MulticlassModel {
        format_version: MODEL_FORMAT_VERSION,
        labels: label_set,
        scheme: options.scheme,
        feature_group: String::new(),
        feature_names: Vec::new(),
        standardization,
        kernel: *kernel,
        config: *config,
        pairwise,
    })
}

impl MulticlassModel {
    pub fn all_converged(&self) -> bool {
        self.pairwise.iter().all(|p| p.model.converged)
    }

    /// Index into `labels` of the predicted class for a raw feature row.
    pub fn predict_index(&self, x: &[f64]) -> Result<usize> {
        let z = self.standardization.apply(x)?;
        let k = self.labels.len();
        match self.scheme {
            MulticlassScheme::OneVsOne => {
                let mut votes = vec![0usize; k];
                let mut strength = vec![0.0f64; k];
                for p in &self.pairwise {
                    let dv = p.model.decision_value(&z)?;
                    let winner = if dv > 0.0 {
                        p.positive
                    } else {
                        p.negative.unwrap_or(p.positive)
                    };
                    votes[winner] += 1;
                    strength[winner] += dv.abs();
                }
                // most votes, then largest summed |decision|, then label order
                let mut best = 0;
                for c in 1..k {
                    if votes[c] > votes[best] || (votes[c] == votes[best] && strength[c] > strength[best]) {
                        best = c;
                    }
                }
                Ok(best)
            }
            MulticlassScheme::OneVsRest => {
                let mut best = (0, f64::NEG_INFINITY);
                for p in &self.pairwise {
                    let dv = p.model.decision_value(&z)?;
                    if dv > best.1 {
                        best = (p.positive, dv);
                    }
                }
                Ok(best.0)
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<&str> {
        Ok(&self.labels[self.predict_index(x)?])
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        rows.par_iter().map(|r| self.predict_index(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
