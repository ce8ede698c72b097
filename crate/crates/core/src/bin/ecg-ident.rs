use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ecg_ident::beats::{read_beats, segment_lead, write_beats};
use ecg_ident::config::PipelineConfig;
use ecg_ident::eval::{EvalReport, ExcludedCounts, ReportFormat};
use ecg_ident::features::{extract_features, FeatureSelection, FeatureTable};
use ecg_ident::hermite::build_basis;
use ecg_ident::ingest::{load_csv, load_record, LeadSignal};
use ecg_ident::pipeline::{evaluate_table, pipeline_run, DataSource};
use ecg_ident::svm::{train_multiclass, Kernel, MulticlassOptions};
use ecg_ident::synth::CohortSpec;
use ecg_ident::{Error, Result};

#[derive(Parser)]
#[command(name = "ecg-ident", version, about = "ECG-based personal identification")]
struct Cli {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a WFDB record (or a CSV) and write one lead with its R peaks as JSON.
    Ingest {
        #[arg(long, required_unless_present = "csv")]
        record: Option<PathBuf>,
        #[arg(long)]
        channel: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Sampling rate of the CSV, Hz.
        #[arg(long, default_value_t = 360.0)]
        fs: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut QS and Hermite windows around every R peak (JSON lines).
    Beats {
        /// One or more ingest documents.
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long = "M")]
        half_width: Option<usize>,
        #[arg(long)]
        pre_ms: Option<f64>,
        #[arg(long)]
        post_ms: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute descriptors (`morph`), Hermite coefficients (`hpe`) or both (`all`).
    Features {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "all")]
        groups: String,
        #[arg(long = "L")]
        order_count: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        keep_truncated: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a multiclass model on every row of a feature CSV.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        group: Option<String>,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long = "C")]
        c: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split, grid-search and report identification rates.
    Evaluate {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        group: Option<String>,
        /// `default` or `single`.
        #[arg(long)]
        grid: Option<String>,
        /// Select hyperparameters on an inner split of the training set.
        #[arg(long)]
        honest_cv: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one beat and write `t,original,reconstructed`.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        beat: usize,
        /// Subject label, when the beats file holds several subjects.
        #[arg(long)]
        label: Option<String>,
        #[arg(long = "L")]
        order_count: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a report as csv or markdown.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: String,
    },
    /// Generate a synthetic cohort and write one ingest document per subject.
    Synth {
        #[arg(long, default_value_t = 18)]
        subjects: usize,
        #[arg(long, default_value_t = 120.0)]
        duration: f64,
        #[arg(long, default_value_t = 360.0)]
        fs: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 2.0)]
        jitter: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run every stage on a WFDB directory, CSV files or a synthetic cohort.
    Run {
        #[arg(long, conflicts_with = "csv")]
        wfdb_dir: Option<PathBuf>,
        #[arg(long, num_args = 1..)]
        csv: Vec<PathBuf>,
        #[arg(long, default_value_t = 360.0)]
        fs: f64,
        /// Seed of the synthetic cohort used when no data is given.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct KernelArgs {
    /// `rbf` or `poly`.
    #[arg(long, default_value = "rbf")]
    kernel: String,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    #[arg(long, default_value_t = 2.0)]
    degree: f64,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn write_text(path: &Path, text: &[u8]) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn set(config: &mut PipelineConfig, key: &str, value: Option<impl ToString>) -> Result<()> {
    match value {
        Some(v) => config.set(key, &v.to_string()),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::Ingest { record, channel, csv, fs, out } => {
            set(&mut config, "channel", channel)?;
            config.validate()?;
            let lead = match (csv, record) {
                (Some(csv), _) => {
                    let label = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    let (rec, ann) = load_csv(&read_text(&csv)?, &label, fs)?;
                    rec.lead(0, &ann)?
                }
                (None, Some(stem)) => {
                    let (rec, ann) = load_record(&stem, &config.annotator)?;
                    rec.lead(config.channel, &ann)?
                }
                (None, None) => return Err(Error::Config("--record or --csv is required".into())),
            };
            let lead = if config.max_duration_s > 0.0 { lead.head(config.max_duration_s) } else { lead };
            eprintln!("{}: {} samples, {} R peaks", lead.label, lead.samples_mv.len(), lead.r_peaks.len());
            write_text(&out, &serde_json::to_vec(&lead)?)?;
        }
        Command::Beats { input, half_width, pre_ms, post_ms, out } => {
            set(&mut config, "hermite_half_width", half_width)?;
            set(&mut config, "pre_r_ms", pre_ms)?;
            set(&mut config, "post_r_ms", post_ms)?;
            config.validate()?;
            let mut all = Vec::new();
            for path in &input {
                let lead: LeadSignal = serde_json::from_str(&read_text(path)?)?;
                let (beats, stats) = segment_lead(&lead, &config.window_spec())?;
                eprintln!(
                    "{}: {} beats ({} truncated, {} degenerate dropped)",
                    lead.label, stats.beats, stats.truncated, stats.degenerate
                );
                all.extend(beats);
            }
            let mut buf = Vec::new();
            write_beats(&mut buf, &all)?;
            write_text(&out, &buf)?;
        }
        Command::Features { input, groups, order_count, delta, keep_truncated, out } => {
            set(&mut config, "order_count", order_count)?;
            set(&mut config, "delta", delta)?;
            config.validate()?;
            let file = fs::File::open(&input).map_err(|e| Error::Io { path: input.clone(), source: e })?;
            let beats = read_beats(BufReader::new(file))?;
            let basis = build_basis(config.order_count, config.delta, config.hermite_half_width)?;
            let selection = FeatureSelection::parse(&groups)?;
            let (table, skipped) = extract_features(&beats, selection, &basis, keep_truncated || config.keep_truncated)?;
            eprintln!("{} rows, {} truncated beats skipped", table.rows.len(), skipped);
            write_text(&out, table.to_csv()?.as_bytes())?;
        }
        Command::Train { features, group, kernel, c, out } => {
            set(&mut config, "group", group)?;
            set(&mut config, "sigma", kernel.sigma)?;
            set(&mut config, "c", c)?;
            config.validate()?;
            let table = FeatureTable::from_csv(&read_text(&features)?)?;
            let cols = config.group.resolve(&table)?;
            let x: Vec<Vec<f64>> = table.rows.iter().map(|r| cols.iter().map(|&i| r.values[i]).collect()).collect();
            let labels: Vec<String> = table.rows.iter().map(|r| r.label.clone()).collect();
            let k = match kernel.kernel.as_str() {
                "rbf" => Kernel::rbf(config.sigma),
                "poly" | "polynomial" => Kernel::polynomial(kernel.scale, kernel.offset, kernel.degree),
                other => return Err(Error::Config(format!("unknown kernel `{other}`"))),
            };
            let options = MulticlassOptions { scheme: config.scheme, scaling: config.scaling };
            let mut model = train_multiclass(&x, &labels, &k, &config.train_config(), options)?;
            model.feature_group = config.group.to_string();
            model.feature_names = cols.iter().map(|&i| table.columns[i].clone()).collect();
            model.save(&out)?;
            eprintln!("{} labels, {} binary models", model.labels.len(), model.pairwise.len());
            if !model.all_converged() {
                eprintln!("warning: some binary models hit the iteration cap");
                return Ok(ExitCode::from(3));
            }
        }
        Command::Evaluate { features, group, grid, honest_cv, out } => {
            set(&mut config, "group", group)?;
            set(&mut config, "grid", grid)?;
            if honest_cv {
                config.set("selection", "inner-validation")?;
            }
            config.validate()?;
            let table = FeatureTable::from_csv(&read_text(&features)?)?;
            let report = evaluate_table(&table, &config, ExcludedCounts::default(), None)?;
            write_text(&out, report.to_json()?.as_bytes())?;
            print!("{}", report.render(ReportFormat::Markdown));
        }
        Command::Reconstruct { input, beat, label, order_count, delta, out } => {
            set(&mut config, "order_count", order_count)?;
            set(&mut config, "delta", delta)?;
            config.validate()?;
            let file = fs::File::open(&input).map_err(|e| Error::Io { path: input.clone(), source: e })?;
            let beats = read_beats(BufReader::new(file))?;
            let hb = beats
                .iter()
                .find(|b| b.ordinal == beat && label.as_ref().is_none_or(|l| &b.label == l))
                .ok_or_else(|| Error::Config(format!("no beat with ordinal {beat}")))?;
            let m = (hb.hermite_window.len() - 1) / 2;
            let basis = build_basis(config.order_count, config.delta, m)?;
            let coeffs = basis.fit(&hb.hermite_window)?;
            let rec = basis.reconstruct(&coeffs.coefficients)?;
            let mut csv = String::from("t,original,reconstructed\n");
            for (k, (a, r)) in hb.hermite_window.iter().zip(&rec).enumerate() {
                csv.push_str(&format!("{},{a},{r}\n", k as isize - m as isize));
            }
            write_text(&out, csv.as_bytes())?;
            eprintln!("residual nrmse {:.6}", coeffs.residual_nrmse);
        }
        Command::Report { input, format } => {
            let report = EvalReport::from_json(&read_text(&input)?)?;
            print!("{}", report.render(format.parse()?));
        }
        Command::Synth { subjects, duration, fs, seed, noise, jitter, out_dir } => {
            let cohort = CohortSpec {
                subjects,
                duration_s: duration,
                sampling_rate: fs,
                noise_fraction: noise,
                jitter_std_samples: jitter,
                seed,
            };
            fs::create_dir_all(&out_dir).map_err(|e| Error::Io { path: out_dir.clone(), source: e })?;
            for (rec, ann) in ecg_ident::synth::generate_cohort(&cohort)? {
                let lead = rec.lead(0, &ann)?;
                write_text(&out_dir.join(format!("{}.ingest.json", lead.label)), &serde_json::to_vec(&lead)?)?;
            }
        }
        Command::Run { wfdb_dir, csv, fs, seed, out_dir } => {
            let source = match (wfdb_dir, csv.is_empty()) {
                (Some(dir), _) => DataSource::wfdb_dir(&dir)?,
                (None, false) => DataSource::Csv { files: csv, sampling_rate: fs },
                (None, true) => DataSource::Synthetic(CohortSpec { seed, ..CohortSpec::default() }),
            };
            let report = pipeline_run(&config, &source, Some(&out_dir))?;
            print!("{}", report.render(ReportFormat::Markdown));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
