use std::process::ExitCode;

use clap::Parser;
use phasedamp_cli::{run, write_output, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let result = run(&config).and_then(|outcome| {
        write_output(&config.settings.out, &outcome.output)?;
        Ok(outcome.status)
    });
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("phasedamp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
