use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::NoConvergence(_) => 2,
            _ => 1,
        }
    }
}

impl From<yamabe_core::Error> for CliError {
    fn from(e: yamabe_core::Error) -> Self {
        use yamabe_core::Error as E;
        match e {
            E::InvalidParameter(_) => CliError::Config(e.to_string()),
            E::NoConvergence { .. } | E::NonPositive { .. } | E::NodalChange { .. } => {
                CliError::NoConvergence(e.to_string())
            }
            _ => CliError::Other(e.to_string()),
        }
    }
}
