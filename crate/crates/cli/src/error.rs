use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Data(_) => 3,
            CliError::NotConverged(_) => 4,
        }
    }
}

impl From<robust_mdp::Error> for CliError {
    fn from(e: robust_mdp::Error) -> Self {
        use robust_mdp::Error as E;
        match e {
            E::Data { .. } => CliError::Data(e.to_string()),
            E::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            E::Io(msg) => CliError::Output(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
