use std::path::PathBuf;

use thiserror::Error;

use crate::integrator::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("homogeneous index s = {s} < 0 requires a mean-free field (zero mode = {zero_mode:e})")]
    NonzeroMean { s: f64, zero_mode: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("ledger schema error: {0}")]
    Schema(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    /// Non-finite values appeared. The trajectory up to the last finite state is kept.
    #[error("blow-up at t = {t}")]
    BlowUp { t: f64, partial: Option<Box<Trajectory>> },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
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
