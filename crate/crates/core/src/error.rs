use std::path::PathBuf;

use crate::model::ModelKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A shape parameter violates its family's bounds.
    #[error("{kind} parameter {name} = {value} violates {constraint}")]
    ParameterBounds {
        kind: ModelKind,
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("{kind} expects {expected} shape parameters, got {got}")]
    ParameterCount {
        kind: ModelKind,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{0} is not supported by the entropy audit (only MaxEnt and Beta are)")]
    UnsupportedFamily(ModelKind),

    #[error("{kind} shape vanishes everywhere on the unit interval")]
    DegenerateShape { kind: ModelKind },

    #[error("fitting {kind} failed: {reason} (start losses: {start_losses:?})")]
    FitFailure {
        kind: ModelKind,
        reason: String,
        start_losses: Vec<f64>,
    },

    #[error("no admissible {kind} parameters after {attempts} draws")]
    Generation { kind: ModelKind, attempts: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate time {time}")]
    DuplicateTime { time: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
