use maxrep::max_reps::RepError;
use maxrep::surface_group::GroupError;
use maxrep_lab::LabError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Unsupported(_) => "unsupported",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Unsupported(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let message = match self {
            CliError::Usage(m)
            | CliError::Config(m)
            | CliError::Unsupported(m)
            | CliError::Numerical(m)
            | CliError::Io(m) => m,
        };
        json!({ "error": self.kind(), "message": message, "exit_code": self.exit_code() }).to_string()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::UnsupportedGenus(_) => CliError::Unsupported(e.to_string()),
            GroupError::WordTooLong(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::Unsupported(_) => CliError::Unsupported(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Unsupported(_) | LabError::GenusMismatch { .. } => CliError::Unsupported(e.to_string()),
            LabError::Group(g) => g.into(),
            LabError::Rep(r) => r.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
