//! Command-line front end for `qmachine-core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;

use args::{Cli, Command};
use commands::Units;
use error::CliResult;

/// Runs one command and returns what should go to stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    let units = Units::new(cli.degrees);
    let value = match &cli.command {
        Command::Prob(a) => commands::prob(a, &units)?,
        Command::Simulate(a) => commands::simulate(a, &units)?,
        Command::Conditional(a) => commands::conditional(a, &units)?,
        Command::Sweep(a) => {
            let (csv, summary) = commands::sweep(a)?;
            match &a.out {
                Some(path) => {
                    std::fs::write(path, csv)?;
                    summary
                }
                None => return Ok(csv),
            }
        }
        Command::Check(c) => commands::check(c)?,
        Command::Survey(a) => commands::survey(a)?,
    };
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    text.push('\n');
    Ok(text)
}
