use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use grouplab_cli::{emit_report, run_experiment, ExperimentConfig};

fn main() -> ExitCode {
    let cfg = match ExperimentConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = run_experiment(&cfg).and_then(|r| emit_report(&r, cfg.format, cfg.out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
