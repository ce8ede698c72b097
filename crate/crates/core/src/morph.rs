//! The ten morphological descriptors of a QS window.
//!
//! | name | meaning |
//! |------|---------|
//! | `pp`  | largest sample, floored at 0 |
//! | `pn`  | smallest sample, capped at 0 |
//! | `arp` | sum of positive samples |
//! | `arn` | sum of magnitudes of negative samples |
//! | `ar`  | `arp + arn` |
//! | `no`  | samples whose magnitude exceeds 70% of the dominant peak |
//! | `ima` | ms from window onset to the largest sample |
//! | `imi` | ms from window onset to the smallest sample |
//! | `s1`  | slope (mV/ms) from onset to the first peak in time |
//! | `s2`  | slope (mV/ms) from the first peak to the second |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of the dominant peak a sample must exceed to count towards `no`.
pub const SIGNIFICANT_AMPLITUDE_FRACTION: f64 = 0.70;

/// Column names, in output order.
pub const DESCRIPTOR_NAMES: [&str; 10] = ["Pp", "Pn", "ArP", "ArN", "Ar", "No", "Ima", "Imi", "S1", "S2"];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MorphDescriptors {
    pub pp: f64,
    pub pn: f64,
    pub arp: f64,
    pub arn: f64,
    pub ar: f64,
    pub no: f64,
    pub ima: f64,
    pub imi: f64,
    pub s1: f64,
    pub s2: f64,
}

impl MorphDescriptors {
    pub fn to_array(&self) -> [f64; 10] {
        [
            self.pp, self.pn, self.arp, self.arn, self.ar, self.no, self.ima, self.imi, self.s1, self.s2,
        ]
    }
}

// first occurrence wins ties
fn arg_extreme(x: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate().skip(1) {
        if better(v, x[best]) {
            best = i;
        }
    }
    best
}

pub fn compute_descriptors(window: &[f64], fs: f64) -> Result<MorphDescriptors> {
    if window.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "QS window needs at least 2 samples, got {}",
            window.len()
        )));
    }
    let ms_per_sample = 1000.0 / fs;

    let i_max = arg_extreme(window, |a, b| a > b);
    let i_min = arg_extreme(window, |a, b| a < b);
    let pp = window[i_max].max(0.0);
    let pn = window[i_min].min(0.0);

    let arp: f64 = window.iter().map(|&v| v.max(0.0)).sum();
    let arn: f64 = window.iter().map(|&v| -v.min(0.0)).sum();

    let threshold = SIGNIFICANT_AMPLITUDE_FRACTION * pp.abs().max(pn.abs());
    let no = window.iter().filter(|v| v.abs() > threshold).count() as f64;

    let (first, second) = if i_max <= i_min { (i_max, i_min) } else { (i_min, i_max) };
    let t_first = first as f64 * ms_per_sample;
    let t_second = second as f64 * ms_per_sample;
    let s1 = if first == 0 {
        0.0
    } else {
        (window[first] - window[0]) / t_first
    };
    let s2 = if second == first {
        0.0
    } else {
        (window[second] - window[first]) / (t_second - t_first)
    };

    Ok(MorphDescriptors {
        pp,
        pn,
        arp,
        arn,
        ar: arp + arn,
        no,
        ima: i_max as f64 * ms_per_sample,
        imi: i_min as f64 * ms_per_sample,
        s1,
        s2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_window() {
        let d = compute_descriptors(&[0.0, 1.0, 2.0, 1.0, 0.0, -1.0], 1000.0).unwrap();
        assert_eq!(
            d,
            MorphDescriptors {
                pp: 2.0,
                pn: -1.0,
                arp: 4.0,
                arn: 1.0,
                ar: 5.0,
                no: 1.0,
                ima: 2.0,
                imi: 5.0,
                s1: 1.0,
                s2: -1.0,
            }
        );
    }

    #[test]
    fn zero_window() {
        let d = compute_descriptors(&[0.0; 54], 360.0).unwrap();
        assert_eq!(d, MorphDescriptors::default());
    }

    #[test]
    fn single_signed_windows_clamp_peaks() {
        let d = compute_descriptors(&[-1.0, -3.0, -2.0], 1000.0).unwrap();
        assert_eq!(d.pp, 0.0);
        assert_eq!(d.pn, -3.0);
        assert_eq!(d.arp, 0.0);
        let d = compute_descriptors(&[1.0, 3.0, 2.0], 1000.0).unwrap();
        assert_eq!(d.pn, 0.0);
        assert_eq!(d.arn, 0.0);
    }

    #[test]
    fn minimum_first_ordering() {
        // minimum at 1 ms, maximum at 3 ms
        let d = compute_descriptors(&[0.0, -2.0, 0.0, 4.0], 1000.0).unwrap();
        assert_eq!(d.s1, -2.0);
        assert_eq!(d.s2, 3.0);
    }

    #[test]
    fn ties_pick_first_occurrence() {
        let d = compute_descriptors(&[0.0, 1.0, 1.0, 0.0], 1000.0).unwrap();
        assert_eq!(d.ima, 1.0);
        assert_eq!(d.imi, 0.0);
        // minimum at onset: first peak is the onset, so S1 is 0
        assert_eq!(d.s1, 0.0);
        assert_eq!(d.s2, 1.0);
    }

    #[test]
    fn short_window_rejected() {
        assert!(compute_descriptors(&[1.0], 360.0).is_err());
        assert!(compute_descriptors(&[], 360.0).is_err());
    }

    #[test]
    fn scaling_by_two() {
        let x = [0.1, 0.5, 1.3, 0.2, -0.7, -0.1];
        let a = compute_descriptors(&x, 360.0).unwrap();
        let doubled: Vec<f64> = x.iter().map(|v| v * 2.0).collect();
        let b = compute_descriptors(&doubled, 360.0).unwrap();
        for (u, v) in [(a.pp, b.pp), (a.pn, b.pn), (a.arp, b.arp), (a.arn, b.arn), (a.ar, b.ar), (a.s1, b.s1), (a.s2, b.s2)] {
            assert!((2.0 * u - v).abs() < 1e-12);
        }
        assert_eq!((a.no, a.ima, a.imi), (b.no, b.ima, b.imi));
    }
}
