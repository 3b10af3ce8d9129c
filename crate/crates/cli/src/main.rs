mod args;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::Context;
use crate::config::ConfigFile;
use crate::error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let config = ConfigFile::load(cli.global.config.as_deref())?;
    let threads = cli
        .global
        .threads
        .or(config.threads)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let ctx = Context {
        seed: cli.global.seed.or(config.seed).unwrap_or(0),
        threads,
        out_dir: cli
            .global
            .out_dir
            .clone()
            .or_else(|| config.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
        config,
    };
    match &cli.command {
        Command::Generate { model, args } => commands::generate(&ctx, model, args),
        Command::Embed { model, args } => commands::embed(&ctx, model, args),
        Command::Eval { args } => commands::eval(&ctx, args),
        Command::Predict { args } => commands::predict_cmd(&ctx, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
