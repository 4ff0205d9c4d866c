use std::process::ExitCode;

use clap::Parser;
use tcl_discord::cli::{run_cli, Cli};

fn main() -> ExitCode {
    run_cli(Cli::parse())
}
