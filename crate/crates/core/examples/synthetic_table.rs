//! Full pipeline on the default 18-subject synthetic cohort: grid search,
//! then every feature group at the selected kernel and C.
//!
//! ```text
//! cargo run --release --example synthetic_table -- [seed] [out-dir]
//! ```

use std::path::PathBuf;

use ecg_ident::config::PipelineConfig;
use ecg_ident::eval::ReportFormat;
use ecg_ident::pipeline::{pipeline_run, DataSource};
use ecg_ident::synth::CohortSpec;

fn main() -> ecg_ident::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let seed = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(7);
    let out_dir = args.next().map(PathBuf::from);

    let source = DataSource::Synthetic(CohortSpec { seed, ..CohortSpec::default() });
    let report = pipeline_run(&PipelineConfig::default(), &source, out_dir.as_deref())?;
    print!("{}", report.render(ReportFormat::Markdown));
    Ok(())
}
