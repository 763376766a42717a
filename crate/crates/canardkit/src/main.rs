use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use canardkit::cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let payload = serde_json::json!({
                "code": "usage",
                "message": e.to_string(),
            });
            eprintln!("{payload}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(failure) => {
            let payload = serde_json::json!({
                "code": failure.code,
                "message": failure.message,
            });
            eprintln!("{payload}");
            ExitCode::from(failure.exit as u8)
        }
    }
}
