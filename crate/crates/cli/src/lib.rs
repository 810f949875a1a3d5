//! Command-line front end: dataset ingestion, model files and the `train`,
//! `predict`, `check` and `plot` commands.

pub mod commands;
pub mod data;
mod error;
pub mod model_file;

pub use commands::{run, Cli, Command};
pub use error::CliError;
pub use model_file::ModelFile;
