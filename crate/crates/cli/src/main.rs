use std::process::ExitCode;

use clap::Parser;
use tsvm_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit with 1; 2 is reserved for regime violations.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if let CliError::Regime {
                witness: Some(w), ..
            } = &e
            {
                eprintln!("witness (common point of all class hulls): {w:?}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
