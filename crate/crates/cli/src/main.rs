use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hclosed_cli::run::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, code) = execute(&cli);
    // a closed pipe is not an error worth reporting
    let _ = if code >= 2 && !cli.json {
        writeln!(std::io::stderr(), "{out}")
    } else {
        writeln!(std::io::stdout(), "{out}")
    };
    ExitCode::from(code)
}
