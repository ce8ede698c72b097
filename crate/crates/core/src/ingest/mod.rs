//! Reading ECG recordings: WFDB records (header, format-212 signals, MIT
//! annotations) and a single-lead CSV fallback.

mod annotations;
mod csv;
mod fmt212;
mod header;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use annotations::{is_beat_code, read_annotations, Annotation, AnnotationSet, Provenance};
pub use csv::load_csv;
pub use fmt212::{decode_212, packed_len};
pub use header::{parse_header, RecordHeader, SignalSpec, DEFAULT_GAIN};

/// A decoded multi-channel recording. Samples are stored in ADC units.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRecord {
    pub header: RecordHeader,
    pub channels: Vec<Vec<f64>>,
}

impl SignalRecord {
    pub fn new(header: RecordHeader, channels: Vec<Vec<f64>>) -> Result<Self> {
        if channels.len() != header.n_signals {
            return Err(Error::InvalidParameter(format!(
                "{} channels for {} declared signals",
                channels.len(),
                header.n_signals
            )));
        }
        if let Some(c) = channels.iter().find(|c| c.len() != header.n_samples) {
            return Err(Error::InvalidParameter(format!(
                "channel has {} samples, header declares {}",
                c.len(),
                header.n_samples
            )));
        }
        Ok(Self { header, channels })
    }

    /// Channel `idx` converted to millivolts: `(adc - baseline) / gain`.
    pub fn millivolts(&self, idx: usize) -> Vec<f64> {
        let spec = &self.header.signals[idx];
        let baseline = spec.baseline as f64;
        self.channels[idx]
            .iter()
            .map(|&v| (v - baseline) / spec.gain)
            .collect()
    }

    /// Select one lead and attach the R-peak positions.
    pub fn lead(&self, channel: usize, annotations: &AnnotationSet) -> Result<LeadSignal> {
        if channel >= self.header.n_signals {
            return Err(Error::InvalidParameter(format!(
                "channel {channel} out of range for {} signals",
                self.header.n_signals
            )));
        }
        annotations.check_bounds(self.header.n_samples)?;
        Ok(LeadSignal {
            label: self.header.record_name.clone(),
            sampling_rate: self.header.sampling_rate,
            channel,
            samples_mv: self.millivolts(channel),
            r_peaks: annotations.samples().collect(),
            provenance: annotations.provenance,
        })
    }
}

/// One lead of one subject, in millivolts, with its R-peak sample indices.
/// This is the document written by the `ingest` stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadSignal {
    pub label: String,
    pub sampling_rate: f64,
    pub channel: usize,
    pub samples_mv: Vec<f64>,
    pub r_peaks: Vec<usize>,
    pub provenance: Provenance,
}

impl LeadSignal {
    /// Keep only the first `seconds` of the recording and the R peaks inside it.
    pub fn head(mut self, seconds: f64) -> Self {
        let n = ((seconds * self.sampling_rate).round() as usize).min(self.samples_mv.len());
        self.samples_mv.truncate(n);
        self.r_peaks.retain(|&r| r < n);
        self
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn with_extension(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Load the signal part of a WFDB record given its path stem (`dir/100`).
pub fn load_signals(stem: &Path) -> Result<SignalRecord> {
    let hea_path = with_extension(stem, "hea");
    let text = fs::read_to_string(&hea_path).map_err(|e| Error::io(&hea_path, e))?;
    let mut header = parse_header(&text)?;
    let dir = stem.parent().unwrap_or(Path::new(""));

    // signals sharing a file are interleaved in that file
    let mut by_file: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in header.signals.iter().enumerate() {
        by_file.entry(s.file_name.as_str()).or_default().push(i);
    }
    let mut channels: Vec<Vec<i16>> = vec![Vec::new(); header.n_signals];
    let mut n_samples = header.n_samples;
    for (file, members) in &by_file {
        let bytes = read_file(&dir.join(file))?;
        if n_samples == 0 {
            n_samples = bytes.len() * 2 / 3 / members.len();
        }
        let decoded = decode_212(&bytes, n_samples, members.len())?;
        for (&idx, ch) in members.iter().zip(decoded) {
            channels[idx] = ch;
        }
    }
    header.n_samples = n_samples;
    let channels = channels
        .into_iter()
        .map(|c| c.into_iter().map(f64::from).collect())
        .collect();
    SignalRecord::new(header, channels)
}

/// Load a full WFDB record: `<stem>.hea`, its `.dat` files and `<stem>.<annotator>`.
pub fn load_record(stem: &Path, annotator: &str) -> Result<(SignalRecord, AnnotationSet)> {
    let record = load_signals(stem)?;
    let atr_path = with_extension(stem, annotator);
    let annotations = read_annotations(&read_file(&atr_path)?)?;
    annotations.check_bounds(record.header.n_samples)?;
    Ok((record, annotations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn millivolt_conversion_is_affine() {
        let header = parse_header("r 1 360 3\nr.dat 212 200(1024)\n").unwrap();
        let rec = SignalRecord::new(header, vec![vec![1024.0, 1224.0, 824.0]]).unwrap();
        assert_eq!(rec.millivolts(0), vec![0.0, 1.0, -1.0]);
    }

    #[test]
    fn channel_length_must_match_header() {
        let header = parse_header("r 1 360 3\nr.dat 212\n").unwrap();
        assert!(SignalRecord::new(header, vec![vec![0.0; 2]]).is_err());
    }

    #[test]
    fn lead_rejects_out_of_range_annotations() {
        let header = parse_header("r 1 360 3\nr.dat 212\n").unwrap();
        let rec = SignalRecord::new(header, vec![vec![0.0; 3]]).unwrap();
        let ann = AnnotationSet::new(
            vec![Annotation { sample: 3, code: 1, channel: 0 }],
            Provenance::File,
        )
        .unwrap();
        assert!(rec.lead(0, &ann).is_err());
        assert!(rec.lead(1, &AnnotationSet::new(vec![], Provenance::File).unwrap()).is_err());
    }

    #[test]
    fn missing_annotation_file_names_the_path() {
        let dir = std::env::temp_dir().join(format!("ecg-ident-ingest-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("r.hea"), "r 1 360 2\nr.dat 212\n").unwrap();
        fs::write(dir.join("r.dat"), [0u8, 0, 0]).unwrap();
        let err = load_record(&dir.join("r"), "atr").unwrap_err();
        assert!(err.to_string().contains("r.atr"), "{err}");
        fs::remove_dir_all(&dir).ok();
    }
}
