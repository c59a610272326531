use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lfcpa::RunConfig;

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match lfcpa::run(&config) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("analyze: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
