use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Cell;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("invalid scenario field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("no path from {from} to {to}")]
    NoPath { from: Cell, to: Cell },

    #[error("target {index} at {cell} is unreachable")]
    UnreachableTarget { index: usize, cell: Cell },

    #[error("exploration exhausted: no candidates and no frontiers")]
    ExplorationExhausted,

    #[error("planner called with an empty action set")]
    EmptyActionSet,

    #[error("invalid metric row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },

    #[error("infeasible generator spec: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("metric bounds violated for agent {agent}: MSPL={mspl}, SR={sr}")]
    MetricBounds { agent: String, mspl: f64, sr: f64 },

    #[error("{path}: {inner}")]
    File { path: PathBuf, inner: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            inner: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
