use std::process::ExitCode;

use clap::Parser;

use nestmod_cli::{execute, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = execute(&cli.command).and_then(|out| {
        match &cli.command.args().output {
            Some(path) => std::fs::write(path, &out.text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
            None => print!("{}", out.text),
        }
        Ok(out.exit_code)
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("nestmod: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
