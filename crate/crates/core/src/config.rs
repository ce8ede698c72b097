//! Flat `key = value` pipeline configuration.
//!
//! ```text
//! # windows
//! pre_r_ms = 50
//! post_r_ms = 100
//! hermite_half_width = 100
//! # Hermite basis
//! order_count = 60
//! delta = 10
//! # classifier
//! sigma = 0.5
//! c = 1000
//! grid = default          # or `single` (just sigma / c)
//! ```
//!
//! Unknown keys are rejected. See [`PipelineConfig::KEYS`] for the full list.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beats::WindowSpec;
use crate::error::{Error, Result};
use crate::eval::{ExperimentOptions, FeatureGroup, Grid, Selection};
use crate::svm::{Kernel, MulticlassOptions, MulticlassScheme, Scaling, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridChoice {
    Default,
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub pre_r_ms: f64,
    pub post_r_ms: f64,
    pub hermite_half_width: usize,
    pub order_count: usize,
    pub delta: f64,
    pub sigma: f64,
    pub c: f64,
    pub grid: GridChoice,
    pub group: FeatureGroup,
    pub train_fraction: f64,
    pub channel: usize,
    pub annotator: String,
    pub keep_truncated: bool,
    pub selection: Selection,
    pub scheme: MulticlassScheme,
    pub scaling: Scaling,
    pub kkt_tolerance: f64,
    pub max_iterations: usize,
    pub table2: bool,
    pub record_timing: bool,
    /// Use only the first this-many seconds of each recording; 0 keeps all.
    pub max_duration_s: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            pre_r_ms: 50.0,
            post_r_ms: 100.0,
            hermite_half_width: 100,
            order_count: 60,
            delta: 10.0,
            sigma: 0.5,
            c: 1000.0,
            grid: GridChoice::Default,
            group: "all+hpe".parse().expect("static group"),
            train_fraction: 2.0 / 3.0,
            channel: 0,
            annotator: "atr".into(),
            keep_truncated: false,
            selection: Selection::OnTest,
            scheme: MulticlassScheme::OneVsOne,
            scaling: Scaling::ZScorePerDimension,
            kkt_tolerance: 1e-3,
            max_iterations: 1_000_000,
            table2: true,
            record_timing: false,
            max_duration_s: 0.0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

impl PipelineConfig {
    pub const KEYS: [&'static str; 21] = [
        "pre_r_ms",
        "post_r_ms",
        "hermite_half_width",
        "order_count",
        "delta",
        "sigma",
        "c",
        "grid",
        "group",
        "train_fraction",
        "channel",
        "annotator",
        "keep_truncated",
        "selection",
        "scheme",
        "scaling",
        "kkt_tolerance",
        "max_iterations",
        "table2",
        "record_timing",
        "max_duration_s",
    ];

    /// Set one key. Values are validated when the whole config is.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "pre_r_ms" => self.pre_r_ms = parse(key, value)?,
            "post_r_ms" => self.post_r_ms = parse(key, value)?,
            "hermite_half_width" | "M" => self.hermite_half_width = parse(key, value)?,
            "order_count" | "L" => self.order_count = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "sigma" => self.sigma = parse(key, value)?,
            "c" | "C" => self.c = parse(key, value)?,
            "grid" => {
                self.grid = match value {
                    "default" => GridChoice::Default,
                    "single" => GridChoice::Single,
                    _ => return Err(Error::Config(format!("invalid grid `{value}`"))),
                }
            }
            "group" => self.group = value.parse().map_err(|_| Error::Config(format!("invalid group `{value}`")))?,
            "train_fraction" => self.train_fraction = parse(key, value)?,
            "channel" => self.channel = parse(key, value)?,
            "annotator" => self.annotator = value.to_string(),
            "keep_truncated" => self.keep_truncated = parse_bool(key, value)?,
            "selection" => {
                self.selection = match value {
                    "on-test" => Selection::OnTest,
                    "inner-validation" => Selection::InnerValidation,
                    _ => return Err(Error::Config(format!("invalid selection `{value}`"))),
                }
            }
            "scheme" => {
                self.scheme = match value {
                    "one-vs-one" => MulticlassScheme::OneVsOne,
                    "one-vs-rest" => MulticlassScheme::OneVsRest,
                    _ => return Err(Error::Config(format!("invalid scheme `{value}`"))),
                }
            }
            "scaling" => {
                self.scaling = match value {
                    "z-score" => Scaling::ZScore,
                    "z-score-per-dimension" => Scaling::ZScorePerDimension,
                    _ => return Err(Error::Config(format!("invalid scaling `{value}`"))),
                }
            }
            "kkt_tolerance" => self.kkt_tolerance = parse(key, value)?,
            "max_iterations" => self.max_iterations = parse(key, value)?,
            "table2" => self.table2 = parse_bool(key, value)?,
            "record_timing" => self.record_timing = parse_bool(key, value)?,
            "max_duration_s" => self.max_duration_s = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parse a `key = value` document over the defaults, then validate.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv(&text)
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let grid = match self.grid {
            GridChoice::Default => "default",
            GridChoice::Single => "single",
        };
        let selection = match self.selection {
            Selection::OnTest => "on-test",
            Selection::InnerValidation => "inner-validation",
        };
        let scheme = match self.scheme {
            MulticlassScheme::OneVsOne => "one-vs-one",
            MulticlassScheme::OneVsRest => "one-vs-rest",
        };
        let scaling = match self.scaling {
            Scaling::ZScore => "z-score",
            Scaling::ZScorePerDimension => "z-score-per-dimension",
        };
        let _ = writeln!(out, "pre_r_ms = {}", self.pre_r_ms);
        let _ = writeln!(out, "post_r_ms = {}", self.post_r_ms);
        let _ = writeln!(out, "hermite_half_width = {}", self.hermite_half_width);
        let _ = writeln!(out, "order_count = {}", self.order_count);
        let _ = writeln!(out, "delta = {}", self.delta);
        let _ = writeln!(out, "sigma = {}", self.sigma);
        let _ = writeln!(out, "c = {}", self.c);
        let _ = writeln!(out, "grid = {grid}");
        let _ = writeln!(out, "group = {}", self.group);
        let _ = writeln!(out, "train_fraction = {}", self.train_fraction);
        let _ = writeln!(out, "channel = {}", self.channel);
        let _ = writeln!(out, "annotator = {}", self.annotator);
        let _ = writeln!(out, "keep_truncated = {}", self.keep_truncated);
        let _ = writeln!(out, "selection = {selection}");
        let _ = writeln!(out, "scheme = {scheme}");
        let _ = writeln!(out, "scaling = {scaling}");
        let _ = writeln!(out, "kkt_tolerance = {}", self.kkt_tolerance);
        let _ = writeln!(out, "max_iterations = {}", self.max_iterations);
        let _ = writeln!(out, "table2 = {}", self.table2);
        let _ = writeln!(out, "record_timing = {}", self.record_timing);
        let _ = writeln!(out, "max_duration_s = {}", self.max_duration_s);
        out
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        self.window_spec().validate().map_err(cfg_err)?;
        if self.order_count == 0 || self.order_count > 2 * self.hermite_half_width + 1 {
            return Err(Error::Config(format!(
                "order_count must be in 1..={}, got {}",
                2 * self.hermite_half_width + 1,
                self.order_count
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        Kernel::rbf(self.sigma).validate().map_err(cfg_err)?;
        self.train_config().validate().map_err(cfg_err)?;
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if !(self.max_duration_s >= 0.0) {
            return Err(Error::Config(format!(
                "max_duration_s must be non-negative, got {}",
                self.max_duration_s
            )));
        }
        if self.annotator.is_empty() {
            return Err(Error::Config("annotator must not be empty".into()));
        }
        Ok(())
    }

    pub fn window_spec(&self) -> WindowSpec {
        WindowSpec {
            pre_r_ms: self.pre_r_ms,
            post_r_ms: self.post_r_ms,
            hermite_half_width: self.hermite_half_width,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            c: self.c,
            kkt_tolerance: self.kkt_tolerance,
            max_iterations: self.max_iterations,
            ..TrainConfig::default()
        }
    }

    pub fn experiment_options(&self) -> ExperimentOptions {
        ExperimentOptions {
            multiclass: MulticlassOptions {
                scheme: self.scheme,
                scaling: self.scaling,
            },
            train: self.train_config(),
            record_timing: self.record_timing,
        }
    }

    pub fn grid(&self) -> Grid {
        match self.grid {
            GridChoice::Default => Grid::default_grid(),
            GridChoice::Single => Grid::single(Kernel::rbf(self.sigma), self.c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.window_spec(), WindowSpec::default());
        assert_eq!(cfg.group.to_string(), "all+hpe");
    }

    #[test]
    fn kv_round_trip() {
        let mut cfg = PipelineConfig::default();
        cfg.set("sigma", "0.75").unwrap();
        cfg.set("grid", "single").unwrap();
        cfg.set("group", "amplitude+slope").unwrap();
        cfg.set("scheme", "one-vs-rest").unwrap();
        assert_eq!(PipelineConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
        assert_eq!(cfg.to_kv().lines().count(), PipelineConfig::KEYS.len());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = PipelineConfig::from_kv("# header\n\nc = 100 # inline\n").unwrap();
        assert_eq!(cfg.c, 100.0);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(PipelineConfig::from_kv("colour = red"), Err(Error::Config(_))));
        assert!(PipelineConfig::from_kv("sigma = 0").is_err());
        assert!(PipelineConfig::from_kv("sigma = wide").is_err());
        assert!(PipelineConfig::from_kv("c = -1").is_err());
        assert!(PipelineConfig::from_kv("pre_r_ms = 0").is_err());
        assert!(PipelineConfig::from_kv("order_count = 300").is_err());
        assert!(PipelineConfig::from_kv("train_fraction = 1.5").is_err());
        assert!(PipelineConfig::from_kv("just a line").is_err());
        assert!(PipelineConfig::from_kv("keep_truncated = maybe").is_err());
        assert!(PipelineConfig::from_kv("max_duration_s = -1").is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let cfg = PipelineConfig::default();
        let kv = cfg.to_kv();
        for key in PipelineConfig::KEYS {
            assert!(kv.contains(&format!("{key} = ")), "{key}");
        }
    }
}
