use std::process::ExitCode;

use clap::Parser;
use switchover_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("switchover {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
