use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use starcong::cli::{run, CommandConfig, EXIT_PARSE};

fn main() -> ExitCode {
    let cfg = match CommandConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_PARSE as u8),
            };
        }
    };
    let stdout = std::io::stdout();
    let code = run(&cfg, &mut stdout.lock());
    ExitCode::from(code as u8)
}
