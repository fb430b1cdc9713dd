//! `shallow-art`: generate corpora, train wrapper models, complete and
//! score images.

mod commands;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use crate::config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "shallow-art", version, about = "Per-pixel classical image completion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    settings: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Write a synthetic corpus plus manifest.json.
    Generate,
    /// Deduplicate, convert and resize a folder of PNG/JPEG files.
    Ingest,
    /// Fit one model per right-half value on the images in --in.
    Train,
    /// Predict the right half of every image in --in.
    Complete,
    /// Complete held-out images and write report.txt and report.json.
    Evaluate,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = RunConfig::resolve(cli.settings).and_then(|cfg| match cli.command {
        Command::Generate => commands::generate(&cfg),
        Command::Ingest => commands::ingest(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Complete => commands::complete(&cfg),
        Command::Evaluate => commands::evaluate(&cfg),
    });
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            error!("{failures} file(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
