//! WFDB `.hea` header parsing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ADC gain assumed when the header omits it or declares zero.
pub const DEFAULT_GAIN: f64 = 200.0;

/// Sampling frequency assumed by WFDB when the record line omits it.
pub const DEFAULT_SAMPLING_RATE: f64 = 250.0;

/// One signal specification line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub file_name: String,
    pub format_code: u32,
    /// ADC units per millivolt.
    pub gain: f64,
    /// ADC value corresponding to 0 mV.
    pub baseline: i32,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub record_name: String,
    pub n_signals: usize,
    /// Hz.
    pub sampling_rate: f64,
    /// Samples per signal. Zero when the header leaves it unspecified.
    pub n_samples: usize,
    pub signals: Vec<SignalSpec>,
}

fn leading_number(field: &str) -> &str {
    let end = field
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || (i == 0 && (c == '-' || c == '+'))))
        .map(|(i, _)| i)
        .unwrap_or(field.len());
    &field[..end]
}

fn parse_record_line(line: &str) -> Result<(String, usize, f64, usize)> {
    let bad = |what: &str| Error::MalformedHeader(format!("{what} in record line `{line}`"));
    let mut fields = line.split_whitespace();
    let name = fields.next().ok_or_else(|| bad("missing record name"))?;
    if name.contains('/') {
        return Err(Error::MalformedHeader(format!(
            "multi-segment record `{name}` is not supported"
        )));
    }
    let n_signals: usize = fields
        .next()
        .ok_or_else(|| bad("missing signal count"))?
        .parse()
        .map_err(|_| bad("non-numeric signal count"))?;
    if n_signals == 0 {
        return Err(bad("zero signal count"));
    }
    // `360`, `360/1000` (counter frequency) or `360(0)` (base counter).
    let sampling_rate = match fields.next() {
        Some(f) => {
            let head = f.split(['/', '(']).next().unwrap_or(f);
            head.parse::<f64>().map_err(|_| bad("bad sampling frequency"))?
        }
        None => DEFAULT_SAMPLING_RATE,
    };
    if !(sampling_rate > 0.0 && sampling_rate.is_finite()) {
        return Err(bad("non-positive sampling frequency"));
    }
    let n_samples = match fields.next() {
        Some(f) => f.parse().map_err(|_| bad("bad sample count"))?,
        None => 0,
    };
    Ok((name.to_string(), n_signals, sampling_rate, n_samples))
}

fn parse_signal_line(line: &str) -> Result<SignalSpec> {
    let bad = |what: &str| Error::MalformedHeader(format!("{what} in signal line `{line}`"));
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 2 {
        return Err(bad("missing format field"));
    }
    let file_name = fields[0].to_string();
    // `212`, `212x1`, `212:3`, `212+512`
    let format_code: u32 = leading_number(fields[1])
        .parse()
        .map_err(|_| bad("bad format code"))?;
    if format_code != 212 {
        return Err(Error::UnsupportedFormat(format_code));
    }

    let mut gain = DEFAULT_GAIN;
    let mut baseline = None;
    if let Some(g) = fields.get(2) {
        let value = leading_number(g);
        if !value.is_empty() {
            let parsed: f64 = value.parse().map_err(|_| bad("bad gain"))?;
            if parsed != 0.0 {
                gain = parsed;
            }
        }
        if let (Some(open), Some(close)) = (g.find('('), g.find(')')) {
            baseline = Some(
                g[open + 1..close]
                    .parse::<i32>()
                    .map_err(|_| bad("bad baseline"))?,
            );
        }
    }
    // field 3 is the ADC resolution, field 4 the ADC zero
    let adc_zero = match fields.get(4) {
        Some(z) => Some(z.parse::<i32>().map_err(|_| bad("bad ADC zero"))?),
        None => None,
    };
    let description = if fields.len() > 8 {
        fields[8..].join(" ")
    } else {
        String::new()
    };
    Ok(SignalSpec {
        file_name,
        format_code,
        gain,
        baseline: baseline.or(adc_zero).unwrap_or(0),
        description,
    })
}

/// Parse the text of a WFDB header file.
///
/// Comment lines start with `#`. A missing gain (or a gain of zero) falls back to
/// 200 ADC units/mV. A missing baseline falls back to the ADC zero field, then to 0.
pub fn parse_header(text: &str) -> Result<RecordHeader> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let record_line = lines
        .next()
        .ok_or_else(|| Error::MalformedHeader("empty header".into()))?;
    let (record_name, n_signals, sampling_rate, n_samples) = parse_record_line(record_line)?;

    let signals = lines
        .take(n_signals)
        .map(parse_signal_line)
        .collect::<Result<Vec<_>>>()?;
    if signals.len() != n_signals {
        return Err(Error::MalformedHeader(format!(
            "record declares {n_signals} signals but {} signal lines follow",
            signals.len()
        )));
    }
    Ok(RecordHeader {
        record_name,
        n_signals,
        sampling_rate,
        n_samples,
        signals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MITDB_100: &str = "100 2 360 650000 0:0:0 0/0/0\n\
        100.dat 212 200 11 1024 995 -22131 0 MLII\n\
        100.dat 212 200 11 1024 1011 20052 0 V5\n\
        # 69 M 1085 1629 x1\n\
        # Aldomet, Inderal\n";

    #[test]
    fn parses_mitdb_style_header() {
        let h = parse_header(MITDB_100).unwrap();
        assert_eq!(h.record_name, "100");
        assert_eq!(h.n_signals, 2);
        assert_eq!(h.sampling_rate, 360.0);
        assert_eq!(h.n_samples, 650000);
        assert_eq!(h.signals[0].gain, 200.0);
        assert_eq!(h.signals[0].baseline, 1024);
        assert_eq!(h.signals[0].description, "MLII");
        assert_eq!(h.signals[1].description, "V5");
    }

    #[test]
    fn defaults_for_missing_gain_and_baseline() {
        let h = parse_header("r 1 128\nr.dat 212\n").unwrap();
        assert_eq!(h.signals[0].gain, DEFAULT_GAIN);
        assert_eq!(h.signals[0].baseline, 0);
        assert_eq!(h.n_samples, 0);

        let h = parse_header("r 1 128 10\nr.dat 212 0\n").unwrap();
        assert_eq!(h.signals[0].gain, DEFAULT_GAIN);
    }

    #[test]
    fn explicit_baseline_and_units() {
        let h = parse_header("r 1 500/1000 20\nr.dat 212 1000(-3)/mV 12 0 0 0 0 lead I\n").unwrap();
        assert_eq!(h.sampling_rate, 500.0);
        assert_eq!(h.signals[0].gain, 1000.0);
        assert_eq!(h.signals[0].baseline, -3);
        assert_eq!(h.signals[0].description, "lead I");
    }

    #[test]
    fn zero_signals_rejected() {
        assert!(matches!(
            parse_header("r 0 360 100\n"),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn unsupported_format_rejected() {
        assert!(matches!(
            parse_header("r 1 360 100\nr.dat 16 200 16 0 0 0 0 I\n"),
            Err(Error::UnsupportedFormat(16))
        ));
    }

    #[test]
    fn signal_count_mismatch_rejected() {
        assert!(matches!(
            parse_header("r 2 360 100\nr.dat 212\n"),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn malformed_record_line() {
        assert!(parse_header("").is_err());
        assert!(parse_header("r x 360\n").is_err());
        assert!(parse_header("r 1 -360\nr.dat 212\n").is_err());
        assert!(parse_header("r/2 2 360 100\n").is_err());
    }
}
