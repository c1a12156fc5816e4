use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no level n = {n} from {engine}")]
    MissingLevel { n: u32, engine: &'static str },
    #[error("{failed} selftest fixture(s) failed")]
    SelftestFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::SelftestFailed { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::MissingLevel { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<hykg::Error> for CliError {
    // Library errors past validation are parameter problems.
    fn from(e: hykg::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
