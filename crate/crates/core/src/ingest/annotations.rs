//! MIT annotation file reader (`.atr`).
//!
//! Each annotation is a little-endian 16-bit word: the top 6 bits hold the
//! type code, the low 10 bits the time increment since the previous one.
//! Pseudo-codes modify the stream rather than marking an event.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SKIP: u16 = 59;
const NUM: u16 = 60;
const SUB: u16 = 61;
const CHN: u16 = 62;
const AUX: u16 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    File,
    Csv,
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub sample: usize,
    pub code: u8,
    pub channel: u8,
}

/// Beat annotations (R-peak markers) of one record, strictly increasing in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub annotations: Vec<Annotation>,
    pub provenance: Provenance,
}

/// Whether an MIT annotation code marks a beat (and therefore an R peak).
pub fn is_beat_code(code: u8) -> bool {
    matches!(code, 1..=13 | 34 | 38)
}

impl AnnotationSet {
    pub fn new(annotations: Vec<Annotation>, provenance: Provenance) -> Result<Self> {
        if let Some(w) = annotations.windows(2).find(|w| w[1].sample <= w[0].sample) {
            return Err(Error::InvalidAnnotations(format!(
                "sample indices not strictly increasing ({} then {})",
                w[0].sample, w[1].sample
            )));
        }
        Ok(Self {
            annotations,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = usize> + '_ {
        self.annotations.iter().map(|a| a.sample)
    }

    /// Check every annotation falls inside a record of `n_samples` samples.
    pub fn check_bounds(&self, n_samples: usize) -> Result<()> {
        match self.annotations.last() {
            Some(a) if a.sample >= n_samples => Err(Error::InvalidAnnotations(format!(
                "annotation at sample {} beyond record length {n_samples}",
                a.sample
            ))),
            _ => Ok(()),
        }
    }
}

fn word_at(bytes: &[u8], pos: usize) -> Result<u16> {
    bytes
        .get(pos..pos + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or(Error::TruncatedAnnotations)
}

/// Decode an MIT-format annotation stream, keeping beat annotations only.
///
/// Annotations sharing a sample index with an earlier beat are dropped.
pub fn read_annotations(bytes: &[u8]) -> Result<AnnotationSet> {
    let mut pos = 0;
    let mut time: i64 = 0;
    let mut channel: u8 = 0;
    let mut last_was_beat = false;
    let mut out: Vec<Annotation> = Vec::new();

    loop {
        let word = word_at(bytes, pos)?;
        pos += 2;
        let code = word >> 10;
        let increment = word & 0x03FF;
        match code {
            0 if increment == 0 => break,
            SKIP => {
                // 32-bit interval stored high word first, each word little-endian
                let hi = word_at(bytes, pos)? as u32;
                let lo = word_at(bytes, pos + 2)? as u32;
                pos += 4;
                time += ((hi << 16) | lo) as i32 as i64;
            }
            NUM | SUB => {}
            CHN => {
                channel = increment as u8;
                if last_was_beat {
                    if let Some(last) = out.last_mut() {
                        last.channel = channel;
                    }
                }
            }
            AUX => {
                let len = increment as usize;
                pos += len + (len & 1);
                if pos > bytes.len() {
                    return Err(Error::TruncatedAnnotations);
                }
            }
            _ => {
                time += increment as i64;
                if time < 0 {
                    return Err(Error::InvalidAnnotations(format!(
                        "negative annotation time {time}"
                    )));
                }
                let code = code as u8;
                last_was_beat = is_beat_code(code);
                if !last_was_beat {
                    continue;
                }
                let sample = time as usize;
                match out.last() {
                    Some(prev) if prev.sample == sample => last_was_beat = false,
                    Some(prev) if prev.sample > sample => {
                        return Err(Error::InvalidAnnotations(format!(
                            "annotation time went backwards ({} then {sample})",
                            prev.sample
                        )))
                    }
                    _ => out.push(Annotation {
                        sample,
                        code,
                        channel,
                    }),
                }
            }
        }
    }
    AnnotationSet::new(out, Provenance::File)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(code: u16, inc: u16) -> [u8; 2] {
        ((code << 10) | inc).to_le_bytes()
    }

    #[test]
    fn single_beat_then_eof() {
        let mut b = Vec::new();
        b.extend(word(1, 77));
        b.extend(word(0, 0));
        let set = read_annotations(&b).unwrap();
        assert_eq!(
            set.annotations,
            vec![Annotation {
                sample: 77,
                code: 1,
                channel: 0
            }]
        );
    }

    #[test]
    fn immediate_eof() {
        assert!(read_annotations(&[0, 0]).unwrap().is_empty());
    }

    #[test]
    fn skip_then_beat() {
        // 100000 = 0x0001_86A0
        let b = [
            word(SKIP, 0).as_slice(),
            &[0x01, 0x00, 0xA0, 0x86],
            &word(1, 5),
            &word(0, 0),
        ]
        .concat();
        let set = read_annotations(&b).unwrap();
        assert_eq!(set.samples().collect::<Vec<_>>(), vec![100005]);
    }

    #[test]
    fn pseudo_codes_and_non_beats_advance_time_only() {
        let b = [
            word(28, 10).as_slice(), // rhythm change, not a beat
            &word(AUX, 3),
            b"(N\0\0",
            &word(1, 20),
            &word(SUB, 1),
            &word(NUM, 4),
            &word(CHN, 1),
            &word(5, 30),
            &word(0, 0),
        ]
        .concat();
        let set = read_annotations(&b).unwrap();
        assert_eq!(
            set.annotations,
            vec![
                Annotation { sample: 30, code: 1, channel: 1 },
                Annotation { sample: 60, code: 5, channel: 1 },
            ]
        );
    }

    #[test]
    fn missing_eof_is_an_error() {
        assert!(matches!(
            read_annotations(&word(1, 5)),
            Err(Error::TruncatedAnnotations)
        ));
        assert!(matches!(read_annotations(&[]), Err(Error::TruncatedAnnotations)));
        assert!(matches!(read_annotations(&[0x00]), Err(Error::TruncatedAnnotations)));
    }

    #[test]
    fn bounds_checked_at_binding() {
        let set = read_annotations(&[word(1, 50), word(0, 0)].concat()).unwrap();
        assert!(set.check_bounds(51).is_ok());
        assert!(set.check_bounds(50).is_err());
    }
}
