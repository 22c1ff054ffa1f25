use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the detector, renderer and evaluation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image has zero size ({width}x{height})")]
    EmptyImage { width: usize, height: usize },

    #[error("unsupported bit depth {0} (expected 8 or 16)")]
    UnsupportedBitDepth(u8),

    #[error("unsupported channel count {0} (expected 1 to 4)")]
    UnsupportedChannels(u8),

    #[error("raster buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid ground truth: {0}")]
    InvalidTruth(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to decode image {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("failed to encode image {path}: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("malformed json in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("malformed config: {0}")]
    ConfigSyntax(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem or by undecodable files.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Decode { .. } | Error::Encode { .. } | Error::Json { .. }
        )
    }
}
