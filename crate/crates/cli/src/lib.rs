//! Library side of the `tscr` command: configuration handling and the
//! subcommands, kept separate from argument parsing so tests can drive them.

pub mod commands;
pub mod config;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Pipeline(#[from] tscr::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration problems, 3 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Pipeline(_) | CliError::Io { .. } => 3,
        }
    }
}

pub use commands::{cmd_analyze, cmd_bench, cmd_bounds, cmd_slice, cmd_synth};
pub use config::RunConfig;
