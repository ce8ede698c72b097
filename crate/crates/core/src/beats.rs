//! Per-beat analysis windows cut around annotated R peaks.
//!
//! Two windows are taken for every beat:
//! - the QS window, `pre_r_ms` before R to `post_r_ms` from R (54 samples at 360 Hz
//!   with the default 50/100 ms), in millivolts, for morphological descriptors;
//! - the Hermite window, `2M + 1` samples centred on R, zero-mean and unit-norm,
//!   for the Hermite expansion.
//!
//! Positions outside the recording are zero-filled and the beat is flagged
//! `truncated`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LeadSignal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub pre_r_ms: f64,
    pub post_r_ms: f64,
    /// Half-width `M` of the Hermite window, in samples.
    pub hermite_half_width: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            pre_r_ms: 50.0,
            post_r_ms: 100.0,
            hermite_half_width: 100,
        }
    }
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.pre_r_ms > 0.0 && self.post_r_ms > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "window bounds must be positive, got pre {} ms / post {} ms",
                self.pre_r_ms, self.post_r_ms
            )));
        }
        if self.hermite_half_width == 0 {
            return Err(Error::InvalidParameter("hermite half-width M must be >= 1".into()));
        }
        Ok(())
    }

    /// QS samples before R and from R onward at `fs` Hz.
    pub fn qs_split(&self, fs: f64) -> (usize, usize) {
        (ms_to_samples(self.pre_r_ms, fs), ms_to_samples(self.post_r_ms, fs))
    }

    pub fn qs_len(&self, fs: f64) -> usize {
        let (pre, post) = self.qs_split(fs);
        pre + post
    }
}

/// Millisecond span to a sample count, rounding half away from zero.
pub fn ms_to_samples(ms: f64, fs: f64) -> usize {
    (ms * fs / 1000.0).round() as usize
}

/// A window of samples and whether any position fell outside the record.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub samples: Vec<f64>,
    pub truncated: bool,
}

fn cut(signal: &[f64], start: isize, len: usize) -> Window {
    let mut truncated = false;
    let samples = (0..len as isize)
        .map(|k| {
            let idx = start + k;
            if idx < 0 || idx as usize >= signal.len() {
                truncated = true;
                0.0
            } else {
                signal[idx as usize]
            }
        })
        .collect();
    Window { samples, truncated }
}

/// Cut the QS window `[r - pre, r + post - 1]`.
pub fn segment_qs(signal: &[f64], r_index: usize, spec: &WindowSpec, fs: f64) -> Window {
    let (pre, post) = spec.qs_split(fs);
    cut(signal, r_index as isize - pre as isize, pre + post)
}

/// Cut the `2M + 1` samples `r - M ..= r + M`.
pub fn extract_hermite_window(signal: &[f64], r_index: usize, half_width: usize) -> Window {
    cut(signal, r_index as isize - half_width as isize, 2 * half_width + 1)
}

/// Zero-mean, unit-L2 normalization.
pub fn normalize_beat(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::DegenerateBeat);
    }
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
    // relative to the input scale, so float noise in a constant window still counts as constant
    let scale = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm == 0.0 || norm <= scale * 1e-12 {
        return Err(Error::DegenerateBeat);
    }
    Ok(centered.into_iter().map(|v| v / norm).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heartbeat {
    pub label: String,
    /// Position of the beat within its record (time order).
    pub ordinal: usize,
    pub r_index: usize,
    pub sampling_rate: f64,
    pub truncated: bool,
    /// QS window in millivolts.
    pub qs_window: Vec<f64>,
    /// Normalized Hermite window.
    pub hermite_window: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentStats {
    pub beats: usize,
    pub truncated: usize,
    pub degenerate: usize,
}

/// Segment every annotated beat of a lead. Degenerate (constant) Hermite
/// windows are dropped and counted; ordinals keep counting past them.
pub fn segment_lead(lead: &LeadSignal, spec: &WindowSpec) -> Result<(Vec<Heartbeat>, SegmentStats)> {
    spec.validate()?;
    let fs = lead.sampling_rate;
    let mut stats = SegmentStats::default();
    let mut beats = Vec::with_capacity(lead.r_peaks.len());
    for (ordinal, &r) in lead.r_peaks.iter().enumerate() {
        if r >= lead.samples_mv.len() {
            return Err(Error::InvalidAnnotations(format!(
                "R peak {r} beyond record length {}",
                lead.samples_mv.len()
            )));
        }
        let qs = segment_qs(&lead.samples_mv, r, spec, fs);
        let raw = extract_hermite_window(&lead.samples_mv, r, spec.hermite_half_width);
        let hermite_window = match normalize_beat(&raw.samples) {
            Ok(w) => w,
            Err(Error::DegenerateBeat) => {
                stats.degenerate += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let truncated = qs.truncated || raw.truncated;
        stats.truncated += truncated as usize;
        stats.beats += 1;
        beats.push(Heartbeat {
            label: lead.label.clone(),
            ordinal,
            r_index: r,
            sampling_rate: fs,
            truncated,
            qs_window: qs.samples,
            hermite_window,
        });
    }
    if stats.degenerate > 0 {
        log::warn!("{}: dropped {} degenerate beats", lead.label, stats.degenerate);
    }
    Ok((beats, stats))
}

/// Write beats as JSON lines, one beat per line.
pub fn write_beats<W: Write>(mut out: W, beats: &[Heartbeat]) -> Result<()> {
    for b in beats {
        serde_json::to_writer(&mut out, b)?;
        out.write_all(b"\n").map_err(|e| Error::io("<beats>", e))?;
    }
    Ok(())
}

pub fn read_beats<R: BufRead>(input: R) -> Result<Vec<Heartbeat>> {
    let mut beats = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::io("<beats>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        beats.push(serde_json::from_str(&line)?);
    }
    Ok(beats)
}
