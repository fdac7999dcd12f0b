mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use krivine::Error;

use args::Cli;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERIC: u8 = 2;

fn exit_code(error: &Error) -> ExitCode {
    ExitCode::from(if error.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_NUMERIC
    })
}

fn execute(cli: &Cli) -> Result<bool, Error> {
    let command = commands::command_name(&cli.command);
    let config = serde_json::to_value(cli).expect("config serializes");
    let run = commands::run(&cli.command)?;
    let text = commands::render(cli.format, command, config, run.outcome)?;
    match &cli.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(run.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Some(workers) = cli.workers {
        if workers == 0
            || rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build_global()
                .is_err()
        {
            eprintln!("error: --workers must be a positive integer");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: scheme identity check failed");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
