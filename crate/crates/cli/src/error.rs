use std::path::PathBuf;

use labelrankt::ErrorKind;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] labelrankt::Error),
    #[error("{path}: {source}")]
    SpecFile {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("report: {0}")]
    Report(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::SpecFile { .. } => 1,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Parameter => 1,
                _ => 2,
            },
            CliError::Report(_) | CliError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
