use std::process::ExitCode;

use clap::Parser;
use log::{error, info, LevelFilter};

use dhs::cli::{run_command, write_failure, Args, CliConfig};

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet {
        LevelFilter::Error
    } else {
        match args.verbose {
            0 => LevelFilter::Warn,
            1 => LevelFilter::Info,
            _ => LevelFilter::Debug,
        }
    };
    env_logger::Builder::new().filter_level(level).init();

    let cfg = match CliConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            error!("{e}");
            return ExitCode::from(2);
        }
    };
    match run_command(&cfg) {
        Ok(outcome) => {
            for p in &outcome.artifacts {
                info!("wrote {}", p.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                error!("checks failed; see the written report");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            error!("{e}");
            if let Err(w) = write_failure(&cfg, &e) {
                error!("could not write failure record: {w}");
            }
            ExitCode::from(2)
        }
    }
}
