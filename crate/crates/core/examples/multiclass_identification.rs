//! Identify six synthetic subjects from their Hermite coefficients and
//! descriptors with a one-vs-one RBF SVM, and print the confusion matrix.

use ecg_ident::config::PipelineConfig;
use ecg_ident::eval::{chronological_split, run_experiment, FeatureGroup};
use ecg_ident::pipeline::{featurize, ingest_source, segment_all, DataSource};
use ecg_ident::svm::Kernel;
use ecg_ident::synth::CohortSpec;

fn main() -> ecg_ident::Result<()> {
    let config = PipelineConfig::default();
    let source = DataSource::Synthetic(CohortSpec { subjects: 6, duration_s: 60.0, ..CohortSpec::default() });
    let leads = ingest_source(&source, &config)?;
    let (beats, _) = segment_all(&leads, &config)?;
    let (table, truncated) = featurize(&beats, &config)?;
    let split = chronological_split(&table.rows, config.train_fraction)?;
    println!("{} beats ({truncated} truncated skipped): {} train, {} test", table.rows.len(), split.train.len(), split.test.len());

    for group in ["amplitude", "hpe", "all+hpe"] {
        let group: FeatureGroup = group.parse()?;
        let row = run_experiment(&table, &split, &group, &Kernel::rbf(0.5), 1000.0, &config.experiment_options())?;
        println!("\n{group}: {:.2}% of beats, {:.0}% of subjects by vote", row.global_rate, row.subject_vote_rate);
        print!("{:>8}", "");
        for l in &row.labels {
            print!("{l:>7}");
        }
        println!();
        for (l, counts) in row.labels.iter().zip(&row.confusion) {
            print!("{l:>8}");
            for c in counts {
                print!("{c:>7}");
            }
            println!();
        }
    }
    Ok(())
}
