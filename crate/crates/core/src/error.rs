use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("sample clock mismatch: {left} vs {right}")]
    ClockMismatch { left: String, right: String },

    #[error(
        "band [{lo_hz}, {hi_hz}] Hz lies outside the Nyquist range (-{nyquist_hz}, {nyquist_hz}]"
    )]
    BandOutsideNyquist {
        lo_hz: f64,
        hi_hz: f64,
        nyquist_hz: f64,
    },

    #[error("signal band and tone band overlap")]
    BandOverlap,

    #[error("frequency {0} Hz is not an integer bin of the capture clock")]
    NotOnBin(f64),

    #[error("no energy in the reference tone band around {0} Hz (tone absent)")]
    ToneAbsent(f64),

    #[error("carrier lost: estimated carrier amplitude {0:e} is below threshold")]
    CarrierLost(f64),

    #[error("seed list is empty")]
    EmptySeeds,

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Configuration and validation failures, as opposed to failures
    /// raised while the processing pipeline runs.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParam(_)
                | Error::BandOutsideNyquist { .. }
                | Error::BandOverlap
                | Error::NotOnBin(_)
                | Error::EmptySeeds
                | Error::Config(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParam(msg()))
    }
}
