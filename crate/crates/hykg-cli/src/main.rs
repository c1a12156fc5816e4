use std::process::ExitCode;

use clap::Parser;
use hykg_cli::output::{paint, use_color};
use hykg_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{} {e}", paint("error:", false, use_color()));
            ExitCode::from(e.exit_code())
        }
    }
}
