mod config;
mod json17;
mod run;

use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    match run::run(&args) {
        Ok(()) => ExitCode::from(0),
        Err(e) => {
            eprintln!("ignifront: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
