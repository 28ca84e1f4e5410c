use std::path::PathBuf;

use relres_engine::EngineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{0}: no offers")]
    NoOffers(PathBuf),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] relres_core::CoreError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Validate(#[from] relres_validate::ValidateError),
    #[error(transparent)]
    Datagen(#[from] relres_datagen::DatagenError),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_GAP_LIMITED: i32 = 3;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit code. Problems that provably have no feasible portfolio
    /// exit like an infeasible solve; a search that stopped without one exits
    /// like a gap-limited solve.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(e) => match e {
                EngineError::PsiUnachievable { .. }
                | EngineError::TooFewUniformOffers { .. }
                | EngineError::InsufficientVolume { .. } => EXIT_INFEASIBLE,
                EngineError::LimitReached { .. } => EXIT_GAP_LIMITED,
                _ => EXIT_INPUT,
            },
            _ => EXIT_INPUT,
        }
    }
}
