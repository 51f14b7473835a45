use std::process::ExitCode;

use clap::Parser;
use zitter_cli::{run, CliError, Flags, RunConfig, EXIT_CONFIG};

fn main() -> ExitCode {
    let flags = match Flags::try_parse() {
        Ok(flags) => flags,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let result = RunConfig::from_flags(&flags).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if let Some(msg) = outcome.diagnostic {
                eprintln!("{msg}");
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("zitter: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
