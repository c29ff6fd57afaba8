use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty image")]
    EmptyImage,
    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),
    #[error("kernel exceeds image: kernel {kernel}x{kernel}, image {height}x{width}")]
    KernelExceedsImage { kernel: usize, height: usize, width: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: String, actual: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("not a color stream")]
    NotColorStream,
    #[error("image smaller than {window}x{window} window: {height}x{width}")]
    ImageTooSmall { window: usize, height: usize, width: usize },
    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },
    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    /// True for errors caused by bad parameters or configuration rather than
    /// by the environment.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_validation(),
            Error::InvalidParam(_)
            | Error::Config(_)
            | Error::DegenerateKernel(_)
            | Error::KernelExceedsImage { .. } => true,
            _ => false,
        }
    }

    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }

    pub(crate) fn dims(expected: impl std::fmt::Debug, actual: impl std::fmt::Debug) -> Self {
        Error::DimMismatch {
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
        }
    }

    pub(crate) fn format(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            what,
            reason: reason.into(),
        }
    }
}
