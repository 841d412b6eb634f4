use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point has non-positive depth in the camera frame")]
    CheiralityViolation,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("measurement coincides with an epipole")]
    EpipoleAtPoint,

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("cheirality test cannot separate the pose candidates (counts {counts:?})")]
    AmbiguousCheirality { counts: [usize; 4] },

    #[error("viewing graph is disconnected")]
    DisconnectedGraph,

    #[error("camera positions are not determined by the edge directions (condition {condition:e})")]
    CollinearDegeneracy { condition: f64 },

    #[error("angle undefined for a zero-length difference vector")]
    DegenerateAngle,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("need {requested} correspondences but only {available} are available")]
    InsufficientCorrespondences { requested: usize, available: usize },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with any context wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures caused by the geometry of the input rather than its
    /// encoding or the filesystem.
    pub fn is_geometric(&self) -> bool {
        matches!(
            self.root(),
            Error::CheiralityViolation
                | Error::DegenerateGeometry(_)
                | Error::EpipoleAtPoint
                | Error::DegenerateConfiguration(_)
                | Error::AmbiguousCheirality { .. }
                | Error::DisconnectedGraph
                | Error::CollinearDegeneracy { .. }
                | Error::DegenerateAngle
        )
    }
}

pub(crate) trait ResultExt<T> {
    fn context_with(self, f: impl FnOnce() -> String) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context_with(self, f: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| e.context(f()))
    }
}
