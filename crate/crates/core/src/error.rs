use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inadmissible state: {0}")]
    Admissibility(String),

    #[error("primitive recovery failed for (D={d}, |M|={m}, E={e}): {reason}")]
    Recovery {
        d: f64,
        m: f64,
        e: f64,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("limiter failure in element {element}: {reason}")]
    Limiter { element: usize, reason: String },

    #[error("element {element}, node {node}: {source}")]
    Node {
        element: usize,
        node: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("step {step}, stage {stage}: {source}")]
    Stage {
        step: usize,
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("maximum step count {0} exceeded before reaching t_final")]
    Timeout(usize),

    #[error("cannot advance: {0}")]
    Stalled(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn admissibility(msg: impl Into<String>) -> Self {
        Error::Admissibility(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
