//! Cut QS and Hermite windows around the R peaks of a synthetic subject.

use ecg_ident::beats::{segment_lead, WindowSpec};
use ecg_ident::synth::{generate_cohort, CohortSpec};

fn main() -> ecg_ident::Result<()> {
    let cohort = CohortSpec { subjects: 2, duration_s: 30.0, ..CohortSpec::default() };
    let (record, annotations) = &generate_cohort(&cohort)?[0];
    let lead = record.lead(0, annotations)?;

    for fs_spec in [WindowSpec::default(), WindowSpec { hermite_half_width: 40, ..WindowSpec::default() }] {
        let (beats, stats) = segment_lead(&lead, &fs_spec)?;
        let (pre, post) = fs_spec.qs_split(lead.sampling_rate);
        println!(
            "M = {}: {} beats, {} truncated, {} degenerate; QS window {pre}+{post} samples, Hermite window {}",
            fs_spec.hermite_half_width,
            stats.beats,
            stats.truncated,
            stats.degenerate,
            beats[0].hermite_window.len()
        );
    }

    let (beats, _) = segment_lead(&lead, &WindowSpec::default())?;
    let b = &beats[3];
    let norm: f64 = b.hermite_window.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mean: f64 = b.hermite_window.iter().sum::<f64>() / b.hermite_window.len() as f64;
    println!("beat {} at sample {}: normalized window mean {mean:.1e}, norm {norm:.6}", b.ordinal, b.r_index);
    Ok(())
}
