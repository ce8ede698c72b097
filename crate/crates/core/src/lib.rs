//! Personal identification from single-lead ECG.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`ingest`]: read WFDB records (format-212 signals, MIT annotations) or CSV.
//! 2. [`beats`]: cut a QS window and a normalized Hermite window around every R peak.
//! 3. [`morph`] and [`hermite`]: ten morphological descriptors and 60 Hermite
//!    expansion coefficients per beat, collected by [`features`].
//! 4. [`svm`]: one-vs-one RBF/polynomial SVM trained with SMO.
//! 5. [`eval`]: chronological 2/3-1/3 split, feature groups, grid search and
//!    the per-group identification-rate table.
//!
//! [`synth`] generates offline test subjects and [`pipeline`] wires the stages
//! together. Runnable examples live in `examples/`.

pub mod beats;
pub mod config;
pub mod error;
pub mod eval;
pub mod features;
pub mod hermite;
pub mod ingest;
pub mod morph;
pub mod pipeline;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
