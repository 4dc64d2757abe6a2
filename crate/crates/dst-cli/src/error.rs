use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad file, bad flag or data that cannot be analysed.
    #[error("{0}")]
    Input(String),
    /// The data reject the model.
    #[error("{0}")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Rejected(_) => 2,
        }
    }
}

pub fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

pub fn rejected<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Rejected(e.to_string())
}
