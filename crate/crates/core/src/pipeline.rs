//! End-to-end run: ingest, beats, features, evaluation.

use std::fs;
use std::path::{Path, PathBuf};

use crate::beats::{segment_lead, write_beats, Heartbeat};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::eval::{
    chronological_split, grid_search, table2_report, EvalReport, ExcludedCounts, REPORT_FORMAT_VERSION,
};
use crate::features::{extract_features, FeatureSelection, FeatureTable};
use crate::hermite::build_basis;
use crate::ingest::{load_csv, load_record, LeadSignal};
use crate::synth::{generate_cohort, CohortSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// WFDB record path stems (`dir/100`, `dir/101`, ...).
    Wfdb(Vec<PathBuf>),
    /// Single-lead CSV files; the file stem becomes the subject label.
    Csv { files: Vec<PathBuf>, sampling_rate: f64 },
    Synthetic(CohortSpec),
}

impl DataSource {
    /// Every record in `dir` that has a `.hea` file, in name order.
    pub fn wfdb_dir(dir: &Path) -> Result<Self> {
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut stems: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "hea"))
            .map(|p| p.with_extension(""))
            .collect();
        stems.sort();
        if stems.is_empty() {
            return Err(Error::Config(format!("no .hea files in {}", dir.display())));
        }
        Ok(DataSource::Wfdb(stems))
    }

    fn seed(&self) -> Option<u64> {
        match self {
            DataSource::Synthetic(c) => Some(c.seed),
            _ => None,
        }
    }
}

/// Read every subject, select the configured lead and apply the duration cap.
pub fn ingest_source(source: &DataSource, config: &PipelineConfig) -> Result<Vec<LeadSignal>> {
    let leads: Vec<LeadSignal> = match source {
        DataSource::Wfdb(stems) => stems
            .iter()
            .map(|stem| {
                let (record, annotations) = load_record(stem, &config.annotator)?;
                record.lead(config.channel, &annotations)
            })
            .collect::<Result<_>>()?,
        DataSource::Csv { files, sampling_rate } => files
            .iter()
            .map(|path| {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let (record, annotations) = load_csv(&text, &label, *sampling_rate)?;
                record.lead(0, &annotations)
            })
            .collect::<Result<_>>()?,
        DataSource::Synthetic(cohort) => generate_cohort(cohort)?
            .iter()
            .map(|(record, annotations)| record.lead(0, annotations))
            .collect::<Result<_>>()?,
    };
    Ok(if config.max_duration_s > 0.0 {
        leads.into_iter().map(|l| l.head(config.max_duration_s)).collect()
    } else {
        leads
    })
}

/// Segment all leads; returns the beats and the number of degenerate beats dropped.
pub fn segment_all(leads: &[LeadSignal], config: &PipelineConfig) -> Result<(Vec<Heartbeat>, usize)> {
    let spec = config.window_spec();
    let mut beats = Vec::new();
    let mut degenerate = 0;
    for lead in leads {
        let (b, stats) = segment_lead(lead, &spec)?;
        degenerate += stats.degenerate;
        beats.extend(b);
    }
    Ok((beats, degenerate))
}

/// Morphological descriptors and Hermite coefficients for every beat.
pub fn featurize(beats: &[Heartbeat], config: &PipelineConfig) -> Result<(FeatureTable, usize)> {
    let basis = build_basis(config.order_count, config.delta, config.hermite_half_width)?;
    extract_features(beats, FeatureSelection::ALL, &basis, config.keep_truncated)
}

/// Split, grid-search the configured group, then run the rate table at the
/// selected hyperparameters.
pub fn evaluate_table(
    table: &FeatureTable,
    config: &PipelineConfig,
    excluded: ExcludedCounts,
    seed: Option<u64>,
) -> Result<EvalReport> {
    let split = chronological_split(&table.rows, config.train_fraction)?;
    let options = config.experiment_options();
    let grid = grid_search(table, &split, &config.group, &config.grid(), config.selection, &options)?;
    let table2 = if config.table2 {
        Some(table2_report(table, &split, &grid.best.kernel, grid.best.c, &options)?)
    } else {
        None
    };
    Ok(EvalReport {
        format_version: REPORT_FORMAT_VERSION,
        seed,
        train_fraction: config.train_fraction,
        excluded,
        grid,
        table2,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Run every stage. With `out_dir`, each stage's output is written there:
/// `<label>.ingest.json`, `beats.jsonl`, `features.csv`, `report.json`.
pub fn pipeline_run(config: &PipelineConfig, source: &DataSource, out_dir: Option<&Path>) -> Result<EvalReport> {
    config.validate()?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let leads = ingest_source(source, config).map_err(|e| e.in_stage("ingest"))?;
    if let Some(dir) = out_dir {
        for lead in &leads {
            write(&dir.join(format!("{}.ingest.json", lead.label)), &serde_json::to_vec(lead)?)
                .map_err(|e| e.in_stage("ingest"))?;
        }
    }

    let (beats, degenerate) = segment_all(&leads, config).map_err(|e| e.in_stage("beats"))?;
    if let Some(dir) = out_dir {
        let mut buf = Vec::new();
        write_beats(&mut buf, &beats)?;
        write(&dir.join("beats.jsonl"), &buf).map_err(|e| e.in_stage("beats"))?;
    }

    let (table, truncated) = featurize(&beats, config).map_err(|e| e.in_stage("features"))?;
    if let Some(dir) = out_dir {
        write(&dir.join("features.csv"), table.to_csv()?.as_bytes()).map_err(|e| e.in_stage("features"))?;
    }
    log::info!(
        "{} subjects, {} beats ({} truncated excluded, {} degenerate dropped)",
        leads.len(),
        table.rows.len(),
        truncated,
        degenerate
    );

    let report = evaluate_table(&table, config, ExcludedCounts { truncated, degenerate }, source.seed())
        .map_err(|e| e.in_stage("evaluate"))?;
    if let Some(dir) = out_dir {
        write(&dir.join("report.json"), report.to_json()?.as_bytes()).map_err(|e| e.in_stage("evaluate"))?;
    }
    Ok(report)
}
