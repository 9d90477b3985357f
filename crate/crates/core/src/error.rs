use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while designing, evaluating or applying a quantizer.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The (N, L, x_max, source) combination violates a design invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A codebook document parsed as JSON but its content is inconsistent.
    #[error("invalid codebook document: {0}")]
    Format(String),

    #[error("unsupported codebook format_version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: I/O error at byte offset {offset}: {source}")]
    Io {
        path: PathBuf,
        offset: u64,
        #[source]
        source: io::Error,
    },

    #[error("{path}: malformed sample at record {record}: {reason}")]
    MalformedSample {
        path: PathBuf,
        record: u64,
        reason: String,
    },

    #[error("{0}: input holds no samples")]
    EmptyInput(PathBuf),

    /// A sweep row failed; the row identity is kept for the caller.
    #[error("sweep row L={segments} {variant}: {source}")]
    SweepRow {
        segments: u32,
        variant: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, offset: u64, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            offset,
            source,
        }
    }

    /// True for failures of the environment (files, corrupted documents)
    /// rather than of the caller's parameters. A version mismatch counts as
    /// a caller error: the document is intact but the wrong kind.
    pub fn is_runtime(&self) -> bool {
        match self {
            Error::Io { .. }
            | Error::Json(_)
            | Error::Format(_)
            | Error::MalformedSample { .. } => true,
            Error::SweepRow { source, .. } => source.is_runtime(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
