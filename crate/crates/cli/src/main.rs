use std::process::ExitCode;

use clap::Parser;
use ptbrach::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 0 for --help/--version and 2 for usage errors
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(Status::InvalidInput.exit_code() as u8);
        }
    };
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(Status::InvalidInput.exit_code() as u8);
            }
        }
        None => print!("{}", outcome.output),
    }
    if outcome.status != Status::Ok {
        eprintln!("status: {:?}", outcome.status);
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
