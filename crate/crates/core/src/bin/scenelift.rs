use std::panic;
use std::process::ExitCode;

use clap::Parser;
use scenelift::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(4),
    }
}
