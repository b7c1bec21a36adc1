use thiserror::Error;

/// Error type shared across the whole pipeline.
///
/// Variants map onto the process exit codes used by the CLI:
/// config errors exit with 2, data/schema problems with 3, and
/// numerical estimation failures with 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("degenerate variable: {0}")]
    DegenerateVariable(String),

    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("specification error: {0}")]
    Specification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 data, 4 estimation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_)
            | Error::Schema(_)
            | Error::Structural(_)
            | Error::DegenerateVariable(_)
            | Error::Io(_) => 3,
            Error::SingularCovariance(_) | Error::Estimation(_) | Error::Specification(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
