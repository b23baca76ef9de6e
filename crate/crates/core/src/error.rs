use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input; `record` is 1-based and counts the CSV header line.
    #[error("parse error at record {record}: {reason}")]
    Parse { record: usize, reason: String },

    #[error("track has no samples")]
    EmptyTrack,

    #[error("non-finite value: {0}")]
    NonFinite(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("sample at t={t} s has no label but label coding was requested")]
    MissingLabel { t: f64 },

    #[error("image of {width}x{height} px exceeds the 1e8 pixel limit")]
    ImageTooLarge { width: u32, height: u32 },

    #[error("layout generation gave up after {attempts} rejection-sampling attempts")]
    LayoutFailure { attempts: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("png encoding failed: {0}")]
    Png(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn parse(record: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            record,
            reason: reason.into(),
        }
    }
}
