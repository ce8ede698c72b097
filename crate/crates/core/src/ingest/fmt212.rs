//! Format 212: pairs of 12-bit two's complement samples packed into three bytes.
//!
//! ```text
//! byte 0: s0 bits 7..0
//! byte 1: s1 bits 11..8 (high nibble) | s0 bits 11..8 (low nibble)
//! byte 2: s1 bits 7..0
//! ```
//! Samples are interleaved across signals in frame order.

use crate::error::{Error, Result};

#[inline]
fn sign_extend_12(raw: u16) -> i16 {
    ((raw << 4) as i16) >> 4
}

/// Bytes needed to hold `total_samples` packed samples.
pub fn packed_len(total_samples: usize) -> usize {
    (total_samples * 3).div_ceil(2)
}

/// Decode a format-212 byte stream into `n_signals` channels of `n_samples` each.
pub fn decode_212(bytes: &[u8], n_samples: usize, n_signals: usize) -> Result<Vec<Vec<i16>>> {
    if n_signals == 0 {
        return Err(Error::InvalidParameter("n_signals must be at least 1".into()));
    }
    let total = n_samples * n_signals;
    let needed = packed_len(total);
    if bytes.len() < needed {
        return Err(Error::TruncatedSignal {
            needed,
            got: bytes.len(),
        });
    }

    let mut channels = vec![Vec::with_capacity(n_samples); n_signals];
    for k in 0..total {
        let group = &bytes[(k / 2) * 3..];
        let raw = if k % 2 == 0 {
            (((group[1] & 0x0F) as u16) << 8) | group[0] as u16
        } else {
            (((group[1] & 0xF0) as u16) << 4) | group[2] as u16
        };
        channels[k % n_signals].push(sign_extend_12(raw));
    }
    Ok(channels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_groups() {
        assert_eq!(decode_212(&[0x10, 0x00, 0x20], 2, 1).unwrap(), vec![vec![16, 32]]);
        assert_eq!(decode_212(&[0x00, 0x0F, 0x00], 2, 1).unwrap(), vec![vec![-256, 0]]);
        assert_eq!(decode_212(&[0, 0, 0], 2, 1).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn extremes() {
        // 0x7FF and 0x800
        let ch = decode_212(&[0xFF, 0x87, 0x00], 2, 1).unwrap();
        assert_eq!(ch, vec![vec![2047, -2048]]);
        let ch = decode_212(&[0xFF, 0xFF, 0xFF], 2, 1).unwrap();
        assert_eq!(ch, vec![vec![-1, -1]]);
    }

    #[test]
    fn interleaves_two_signals() {
        let ch = decode_212(&[0x01, 0x00, 0x02, 0x03, 0x00, 0x04], 2, 2).unwrap();
        assert_eq!(ch, vec![vec![1, 3], vec![2, 4]]);
    }

    #[test]
    fn odd_total_uses_two_byte_tail() {
        let ch = decode_212(&[0x05, 0x00], 1, 1).unwrap();
        assert_eq!(ch, vec![vec![5]]);
    }

    #[test]
    fn truncated_stream() {
        assert!(matches!(
            decode_212(&[0, 0], 2, 1),
            Err(Error::TruncatedSignal { needed: 3, got: 2 })
        ));
    }
}
