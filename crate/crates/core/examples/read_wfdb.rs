//! Read a WFDB record (format 212 + MIT annotations) and summarize it.
//!
//! ```text
//! cargo run --example read_wfdb -- /data/mitdb/100 [annotator]
//! ```

use std::path::PathBuf;

use ecg_ident::ingest::load_record;

fn main() -> ecg_ident::Result<()> {
    let mut args = std::env::args().skip(1);
    let Some(stem) = args.next().map(PathBuf::from) else {
        eprintln!("usage: read_wfdb <record-stem> [annotator]");
        std::process::exit(2);
    };
    let annotator = args.next().unwrap_or_else(|| "atr".into());
    let (record, annotations) = load_record(&stem, &annotator)?;
    let h = &record.header;
    println!("record {}: {} signals at {} Hz, {} samples", h.record_name, h.n_signals, h.sampling_rate, h.n_samples);
    for (i, s) in h.signals.iter().enumerate() {
        let mv = record.millivolts(i);
        let (lo, hi) = mv.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        println!("  [{i}] {} gain {} baseline {}: {lo:.3} .. {hi:.3} mV", s.description, s.gain, s.baseline);
    }
    let peaks: Vec<usize> = annotations.samples().collect();
    println!("{} beat annotations", peaks.len());
    if peaks.len() > 1 {
        let rr: Vec<f64> = peaks.windows(2).map(|w| (w[1] - w[0]) as f64 / h.sampling_rate).collect();
        let mean = rr.iter().sum::<f64>() / rr.len() as f64;
        println!("mean RR {mean:.3} s ({:.1} bpm)", 60.0 / mean);
    }
    Ok(())
}
