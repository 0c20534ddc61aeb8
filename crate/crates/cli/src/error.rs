use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Numerical(#[from] sharpext_core::Error),

    /// A computation finished but missed its tolerance.
    #[error("{0}")]
    Tolerance(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            // Parameter combinations the kernels reject are caller errors too.
            CliError::Numerical(sharpext_core::Error::Domain(_)) => 2,
            CliError::Numerical(_) | CliError::Tolerance(_) => 3,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) | CliError::Numerical(sharpext_core::Error::Domain(_)) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Tolerance(_) => "tolerance",
            CliError::Io(_) => "io",
            CliError::Json(_) => "serialization",
        }
    }

    pub fn to_json(&self) -> String {
        let body = ErrorBody {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        };
        serde_json::to_string(&body).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Validation(msg.into()))
}
