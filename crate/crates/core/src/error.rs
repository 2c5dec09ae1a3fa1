use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("self-loop on node `{0}` rejected")]
    SelfLoop(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("invalid edge weight {0}: weights must be positive and finite")]
    InvalidWeight(f64),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("directed networks unsupported (line {line}: `{section}`)")]
    DirectedUnsupported { line: usize, section: String },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("panel `{label}`: {source}")]
    Panel {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn in_panel(self, label: &str) -> Self {
        Error::Panel {
            label: label.to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit code: 2 for input/validation problems, 3 for failures
    /// during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Panel { source, .. } => source.exit_code(),
            Error::Undefined(_) | Error::NoConvergence { .. } => 3,
            _ => 2,
        }
    }
}
