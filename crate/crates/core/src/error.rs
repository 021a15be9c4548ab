use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid residue {ch:?} at index {index}")]
    InvalidResidue { ch: char, index: usize },

    #[error("sequence length {0} is below the minimum of 3")]
    SequenceTooShort(usize),

    #[error("dimension mismatch: expected {expected} angles, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("angle component {index} = {value} lies outside [-pi, pi]")]
    AngleRange { index: usize, value: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("local move contract violated: {0}")]
    Contract(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown sequence label {0:?}")]
    UnknownSequence(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rank-deficient fit: all points share the same length")]
    RankDeficient,

    #[error("parse error{}: {msg}", .line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line: Some(line), msg: msg.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user input (as opposed to runtime failures).
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Json(_))
    }
}
