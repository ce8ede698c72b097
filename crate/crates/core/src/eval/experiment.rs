use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chronological_split, table2_rows, FeatureGroup, Split};
use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::svm::{train_multiclass, Kernel, MulticlassOptions, TrainConfig};

/// One (feature group, kernel, C) experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub feature_group: FeatureGroup,
    pub kernel: Kernel,
    pub c: f64,
    /// Percentage of test beats assigned to the right subject.
    pub global_rate: f64,
    /// Percentage of subjects whose test-beat majority vote is right.
    pub subject_vote_rate: f64,
    pub labels: Vec<String>,
    /// `confusion[true][predicted]`, indexed like `labels`.
    pub confusion: Vec<Vec<usize>>,
    pub n_train: usize,
    pub n_test: usize,
    pub converged: bool,
    /// Only filled when timing is requested; it would break byte-identical reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl EvalRow {
    pub fn correct(&self) -> usize {
        (0..self.confusion.len()).map(|i| self.confusion[i][i]).sum()
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }
}

pub fn rate_from_confusion(confusion: &[Vec<usize>]) -> f64 {
    let total: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..confusion.len()).map(|i| confusion[i][i]).sum();
    if total == 0 {
        0.0
    } else {
        100.0 * correct as f64 / total as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub multiclass: MulticlassOptions,
    pub train: TrainConfig,
    pub record_timing: bool,
}

fn select(table: &FeatureTable, idx: &[usize], cols: &[usize]) -> (Vec<Vec<f64>>, Vec<String>) {
    idx.iter()
        .map(|&i| {
            let row = &table.rows[i];
            (cols.iter().map(|&c| row.values[c]).collect(), row.label.clone())
        })
        .unzip()
}

/// Standardize on the training rows, train, and classify every test row.
pub fn run_experiment(
    table: &FeatureTable,
    split: &Split,
    group: &FeatureGroup,
    kernel: &Kernel,
    c: f64,
    options: &ExperimentOptions,
) -> Result<EvalRow> {
    let start = Instant::now();
    let cols = group.resolve(table)?;
    let (x_train, y_train) = select(table, &split.train, &cols);
    let (x_test, y_test) = select(table, &split.test, &cols);
    let config = TrainConfig { c, ..options.train };
    let mut model = train_multiclass(&x_train, &y_train, kernel, &config, options.multiclass)?;
    model.feature_group = group.to_string();
    model.feature_names = cols.iter().map(|&i| table.columns[i].clone()).collect();

    let k = model.labels.len();
    let predicted = model.predict_batch(&x_test)?;
    let mut confusion = vec![vec![0usize; k]; k];
    let mut votes = vec![vec![0usize; k]; k];
    for (truth, &p) in y_test.iter().zip(&predicted) {
        let t = model.labels.binary_search(truth).map_err(|_| {
            Error::InvalidTrainingData(format!("test subject {truth} has no training beats"))
        })?;
        confusion[t][p] += 1;
        votes[t][p] += 1;
    }
    let tested: Vec<usize> = (0..k).filter(|&t| votes[t].iter().sum::<usize>() > 0).collect();
    let subject_hits = tested
        .iter()
        .filter(|&&t| {
            let best = (0..k).fold(0, |b, p| if votes[t][p] > votes[t][b] { p } else { b });
            best == t
        })
        .count();

    Ok(EvalRow {
        feature_group: group.clone(),
        kernel: *kernel,
        c,
        global_rate: rate_from_confusion(&confusion),
        subject_vote_rate: if tested.is_empty() {
            0.0
        } else {
            100.0 * subject_hits as f64 / tested.len() as f64
        },
        labels: model.labels.clone(),
        confusion,
        n_train: x_train.len(),
        n_test: x_test.len(),
        converged: model.all_converged(),
        wall_time_ms: options
            .record_timing
            .then(|| start.elapsed().as_secs_f64() * 1000.0),
    })
}

/// A hyperparameter grid: kernels crossed with regularization values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub kernels: Vec<Kernel>,
    pub c_values: Vec<f64>,
}

impl Grid {
    /// RBF widths 0.25..1, polynomial degrees 1 and 2 (a = 1, b = 0), C in {10, 100, 1000}.
    pub fn default_grid() -> Self {
        let mut kernels: Vec<Kernel> = [0.25, 0.5, 0.75, 1.0].into_iter().map(Kernel::rbf).collect();
        kernels.extend([1.0, 2.0].into_iter().map(|d| Kernel::polynomial(1.0, 0.0, d)));
        Self {
            kernels,
            c_values: vec![10.0, 100.0, 1000.0],
        }
    }

    pub fn single(kernel: Kernel, c: f64) -> Self {
        Self {
            kernels: vec![kernel],
            c_values: vec![c],
        }
    }

    pub fn cells(&self) -> Vec<(Kernel, f64)> {
        self.kernels
            .iter()
            .flat_map(|k| self.c_values.iter().map(move |&c| (*k, c)))
            .collect()
    }
}

/// Where hyperparameters are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Pick the cell with the best test rate.
    #[default]
    OnTest,
    /// Pick on a chronological inner split of the training set, then retrain.
    InnerValidation,
}

fn kernel_rank(k: &Kernel) -> (u8, f64) {
    match *k {
        Kernel::Rbf { sigma } => (0, sigma),
        Kernel::Polynomial { degree, .. } => (1, degree),
    }
}

/// Higher rate first, then smaller C, then smaller width/degree, RBF before polynomial.
fn better(a: &EvalRow, b: &EvalRow) -> Ordering {
    b.global_rate
        .total_cmp(&a.global_rate)
        .then(a.c.total_cmp(&b.c))
        .then_with(|| {
            let (ka, wa) = kernel_rank(&a.kernel);
            let (kb, wb) = kernel_rank(&b.kernel);
            wa.total_cmp(&wb).then(ka.cmp(&kb))
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub selection: Selection,
    pub best: EvalRow,
    /// Every cell, in grid order. Under inner validation these are the
    /// validation-split rows.
    pub rows: Vec<EvalRow>,
}

pub fn grid_search(
    table: &FeatureTable,
    split: &Split,
    group: &FeatureGroup,
    grid: &Grid,
    selection: Selection,
    options: &ExperimentOptions,
) -> Result<GridResult> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::Config("empty hyperparameter grid".into()));
    }
    let search_split = match selection {
        Selection::OnTest => split.clone(),
        Selection::InnerValidation => {
            let train_rows: Vec<_> = split.train.iter().map(|&i| table.rows[i].clone()).collect();
            let inner = chronological_split(&train_rows, 2.0 / 3.0)?;
            Split {
                train: inner.train.iter().map(|&i| split.train[i]).collect(),
                test: inner.test.iter().map(|&i| split.train[i]).collect(),
            }
        }
    };
    let rows = cells
        .par_iter()
        .map(|(k, c)| run_experiment(table, &search_split, group, k, *c, options))
        .collect::<Result<Vec<_>>>()?;
    let chosen = rows.iter().min_by(|a, b| better(a, b)).expect("non-empty grid");
    let best = match selection {
        Selection::OnTest => chosen.clone(),
        Selection::InnerValidation => run_experiment(table, split, group, &chosen.kernel, chosen.c, options)?,
    };
    Ok(GridResult { selection, best, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub feature_group: FeatureGroup,
    pub published_rate: f64,
    pub reproduced: EvalRow,
    /// `reproduced - published`, percentage points.
    pub delta: f64,
}

/// Run all thirteen feature-group rows at one hyperparameter setting.
pub fn table2_report(
    table: &FeatureTable,
    split: &Split,
    kernel: &Kernel,
    c: f64,
    options: &ExperimentOptions,
) -> Result<Vec<Table2Row>> {
    table2_rows()
        .into_par_iter()
        .map(|(group, published_rate)| {
            let reproduced = run_experiment(table, split, &group, kernel, c, options)?;
            Ok(Table2Row {
                feature_group: group,
                published_rate,
                delta: reproduced.global_rate - published_rate,
                reproduced,
            })
        })
        .collect()
}
