use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use coherence_cli::commands::{run, Cli};

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "undetermined".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
