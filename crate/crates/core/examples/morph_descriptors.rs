//! The ten morphological descriptors for the first beats of three subjects.

use ecg_ident::beats::{segment_lead, WindowSpec};
use ecg_ident::morph::{compute_descriptors, DESCRIPTOR_NAMES};
use ecg_ident::synth::{generate_cohort, CohortSpec};

fn main() -> ecg_ident::Result<()> {
    let cohort = CohortSpec { subjects: 3, duration_s: 10.0, ..CohortSpec::default() };
    print!("{:<8}{:>4}", "subject", "#");
    for name in DESCRIPTOR_NAMES {
        print!("{name:>9}");
    }
    println!();
    for (record, annotations) in generate_cohort(&cohort)? {
        let lead = record.lead(0, &annotations)?;
        let (beats, _) = segment_lead(&lead, &WindowSpec::default())?;
        for b in beats.iter().filter(|b| !b.truncated).take(3) {
            let d = compute_descriptors(&b.qs_window, b.sampling_rate)?;
            print!("{:<8}{:>4}", b.label, b.ordinal);
            for v in d.to_array() {
                print!("{v:>9.3}");
            }
            println!();
        }
    }
    Ok(())
}
