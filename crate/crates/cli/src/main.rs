use std::io::Write;
use std::process::ExitCode;

use ccl_cli::{run, workers_from_env, Cli, CliError, Command};
use clap::Parser;

fn output_path(cmd: &Command) -> Option<&std::path::Path> {
    match cmd {
        Command::Point(a) => a.common.output.as_deref(),
        Command::Grid(a) => a.common.output.as_deref(),
        Command::Reconstruct(a) => a.common.output.as_deref(),
        Command::FvCompare(a) => a.common.output.as_deref(),
        Command::Table(a) => a.output.as_deref(),
        Command::List(_) => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = workers_from_env().and_then(|w| run(&cli, w, &mut std::io::stderr())).and_then(|bytes| {
        match output_path(&cli.command) {
            Some(p) => std::fs::write(p, &bytes)?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok::<(), CliError>(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ccl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
