use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad input: {0}")]
    BadInput(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("verification failed: {}", .0.join(", "))]
    VerificationFailed(Vec<&'static str>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::BadInput(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<improper_ic::Error> for CliError {
    fn from(e: improper_ic::Error) -> Self {
        CliError::BadInput(e.to_string())
    }
}
