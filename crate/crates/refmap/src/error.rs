use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("stage `{stage}` needs {missing} (run `{upstream}` first)")]
    MissingArtifact {
        stage: &'static str,
        upstream: &'static str,
        missing: PathBuf,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("remote lookup unavailable: {0}")]
    Remote(String),

    #[error(transparent)]
    Funding(#[from] refmap_core::funding::FundingError),

    #[error(transparent)]
    Stats(#[from] refmap_core::stats::StatsError),

    #[error(transparent)]
    Segment(#[from] refmap_core::corpus::SegmentError),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Parse { .. } | Error::Input { .. } | Error::Segment(_) => 3,
            Error::MissingArtifact { .. } => 4,
            Error::Io { .. } => 5,
            Error::Remote(_) => 6,
            Error::Funding(_) | Error::Stats(_) => 7,
        }
    }
}
