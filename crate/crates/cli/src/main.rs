use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pi1_haar_cli::{execute, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = RunConfig::try_from(&cli.options).and_then(|cfg| execute(cli.command, &cfg));
    match outcome {
        Ok(outcome) => {
            let written = match &cli.options.out {
                Some(path) => {
                    fs::write(path, &outcome.report).map_err(|e| format!("cannot write {}: {e}", path.display()))
                }
                None => std::io::stdout().write_all(outcome.report.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                eprintln!("pi1haar: {msg}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("pi1haar: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
