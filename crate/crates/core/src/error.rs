use std::io;

/// Errors produced anywhere in the pipeline.
///
/// Variants are grouped by what went wrong rather than by which module raised
/// them, so that the command-line front end can map them onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("timestep {index} out of range (graph has {len} snapshots)")]
    TimestepOutOfRange { index: usize, len: usize },

    #[error("node id {id} out of range (registry has {len} nodes)")]
    NodeOutOfRange { id: usize, len: usize },

    #[error("unknown node label {0:?}")]
    UnknownLabel(String),

    #[error("invalid edge ({0}, {1}): self-loops are not allowed")]
    SelfLoop(usize, usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no events")]
    NoEvents,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("missing ({timestep},{node})")]
    MissingEntry { timestep: usize, node: usize },

    #[error("{0}")]
    Format(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("sweep {parameter} = {value}, repeat {repeat}: {source}")]
    Sweep {
        parameter: &'static str,
        value: usize,
        repeat: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Strip any stage wrappers and return the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } | Error::Sweep { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Attach a pipeline stage name to an error.
pub(crate) trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
