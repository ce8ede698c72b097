use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the identification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported signal format {0} (only 212 is supported)")]
    UnsupportedFormat(u32),

    #[error("truncated signal stream: need {needed} bytes, got {got}")]
    TruncatedSignal { needed: usize, got: usize },

    #[error("annotation stream ended before the EOF marker")]
    TruncatedAnnotations,

    #[error("invalid annotations: {0}")]
    InvalidAnnotations(String),

    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error("degenerate beat: window is constant")]
    DegenerateBeat,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial kernel undefined: negative base {base} with non-integer degree {degree}")]
    NegativePolynomialBase { base: f64, degree: f64 },

    #[error("invalid training data: {0}")]
    InvalidTrainingData(String),

    #[error("solver did not converge within {0} iterations")]
    NotConverged(usize),

    #[error("rank-deficient design matrix")]
    RankDeficient,

    #[error("unknown feature group `{0}`")]
    UnknownGroup(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wrap an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 data error, 2 config error, 3 convergence failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::Config(_) | Error::UnknownGroup(_) | Error::InvalidParameter(_) => 2,
            Error::NotConverged(_) => 3,
            _ => 1,
        }
    }
}
