use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the pipeline can report.
///
/// The `name()` of each variant is the stable identifier printed by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence too short: need at least {needed} frames, found {found}")]
    SequenceTooShort { needed: usize, found: usize },

    #[error("inconsistent dimensions: {path} is {found_w}x{found_h}, expected {expected_w}x{expected_h}")]
    InconsistentDimensions {
        path: PathBuf,
        expected_w: usize,
        expected_h: usize,
        found_w: usize,
        found_h: usize,
    },

    #[error("ingest failure for {path}: {reason}")]
    IngestFailure { path: PathBuf, reason: String },

    #[error(
        "downscale too aggressive: {width}x{height} frame cannot be reduced by factor {factor}"
    )]
    DownscaleTooAggressive {
        width: usize,
        height: usize,
        factor: usize,
    },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("spectrum mismatch: {a_w}x{a_h} vs {b_w}x{b_h}")]
    SpectrumMismatch {
        a_w: usize,
        a_h: usize,
        b_w: usize,
        b_h: usize,
    },

    #[error("numeric instability: imaginary residue {residue:e} exceeds {tolerance:e}")]
    NumericInstability { residue: f64, tolerance: f64 },

    #[error("degenerate correlation surface (peak response {peak_response})")]
    DegenerateSurface { peak_response: f64 },

    #[error("empty sequence")]
    EmptySequence,

    #[error("comparison undefined: {0}")]
    ComparisonUndefined(String),

    #[error("invalid shift ({dx}, {dy}) for {width}x{height} frame")]
    InvalidShift {
        dx: i64,
        dy: i64,
        width: usize,
        height: usize,
    },

    #[error("script parse error at token '{token}': {reason}")]
    ScriptParse { token: String, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("format error in {path}, line {line}: {reason}")]
    Format {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Process exit status classes used by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Usage = 1,
    Data = 2,
    Numeric = 3,
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::SequenceTooShort { .. } => "sequence-too-short",
            Error::InconsistentDimensions { .. } => "inconsistent-dimensions",
            Error::IngestFailure { .. } => "ingest-failure",
            Error::DownscaleTooAggressive { .. } => "downscale-too-aggressive",
            Error::InvalidFrame(_) => "invalid-frame",
            Error::SpectrumMismatch { .. } => "spectrum-mismatch",
            Error::NumericInstability { .. } => "numeric-instability",
            Error::DegenerateSurface { .. } => "degenerate-surface",
            Error::EmptySequence => "empty-sequence",
            Error::ComparisonUndefined(_) => "comparison-undefined",
            Error::InvalidShift { .. } => "invalid-shift",
            Error::ScriptParse { .. } => "script-parse-error",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Format { .. } => "format-error",
            Error::Io { .. } => "io-error",
        }
    }

    pub fn exit_class(&self) -> ExitClass {
        match self {
            Error::ScriptParse { .. } | Error::InvalidConfig(_) => ExitClass::Usage,
            Error::NumericInstability { .. } | Error::DegenerateSurface { .. } => {
                ExitClass::Numeric
            }
            _ => ExitClass::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
