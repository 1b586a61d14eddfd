use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<nfkit::Error> for CliError {
    fn from(e: nfkit::Error) -> Self {
        use nfkit::Error as E;
        match e {
            E::Parameter(m) | E::OutOfDomain(m) | E::Unsupported(m) => CliError::Config(m),
            E::Infeasible(m) => CliError::Infeasible(m),
            E::Singularity { .. } => CliError::Infeasible(e.to_string()),
            E::Numeric(m) => CliError::Numeric(m),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
