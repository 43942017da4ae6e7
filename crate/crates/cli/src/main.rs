use std::process::ExitCode;

use clap::Parser;
use simroots_cli::{dispatch, Cli};

fn main() -> ExitCode {
    ExitCode::from(dispatch(&Cli::parse()))
}
