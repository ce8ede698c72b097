//! Rate table on a directory of WFDB records, e.g. the 18 MIT-BIH normal
//! sinus rhythm recordings, using the first 30 minutes of each.
//!
//! ```text
//! cargo run --release --example mitbih_table -- /data/nsrdb [config.conf] [out-dir]
//! ```
//!
//! The delta column compares each group with the published rate.

use std::path::{Path, PathBuf};

use ecg_ident::config::PipelineConfig;
use ecg_ident::eval::ReportFormat;
use ecg_ident::pipeline::{pipeline_run, DataSource};

fn main() -> ecg_ident::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let Some(dir) = args.next().map(PathBuf::from) else {
        eprintln!("usage: mitbih_table <record-dir> [config] [out-dir]");
        std::process::exit(2);
    };
    let mut config = match args.next() {
        Some(path) => PipelineConfig::load(Path::new(&path))?,
        None => PipelineConfig::default(),
    };
    if config.max_duration_s == 0.0 {
        config.max_duration_s = 1800.0;
    }
    let out_dir = args.next().map(PathBuf::from);

    let source = DataSource::wfdb_dir(&dir)?;
    let report = pipeline_run(&config, &source, out_dir.as_deref())?;
    print!("{}", report.render(ReportFormat::Markdown));
    Ok(())
}
