use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("analysis error: {0}")]
    Analysis(#[from] skewflow::SkewflowError),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
