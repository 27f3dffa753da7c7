use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(String),

    #[error(transparent)]
    Core(#[from] bsm_core::Error),

    #[error("output: {0}")]
    Output(String),
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn spec_err(msg: impl Into<String>) -> CliError {
    CliError::Spec(msg.into())
}
