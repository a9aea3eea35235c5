//! `spam`: generate styled-speech corpora, train the scorer, score
//! prompt/speech pairs and run the evaluation protocols.

mod commands;
mod config;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;

/// Exit codes are stable for scripting: 0 success, 1 usage error,
/// 2 data error, 3 runtime failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(
    name = "spam",
    about = "Style prompt adherence scoring: data generation, training, scoring, evaluation",
    version
)]
struct Cli {
    /// Configuration file (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Base random seed for the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Force the single-threaded deterministic execution path. Runs are
    /// deterministic for a fixed seed either way; the flag exists so
    /// scripts can state the expectation explicitly.
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic corpus, manifest, prompt variants and the
    /// constructed MOS stand-in table.
    GenData(commands::gen_data::Args),
    /// Train the scorer on a generated corpus.
    Train(commands::train::Args),
    /// Score a single audio/prompt pair, or a manifest with variants.
    Score(commands::score::Args),
    /// Evaluation protocols over score tables.
    #[command(subcommand)]
    Eval(commands::eval::EvalCommand),
}

fn main() {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(config) => config,
            Err(err) => {
                eprintln!("error: {err}");
                std::process::exit(EXIT_USAGE);
            }
        },
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(config.seed);

    let result = match cli.command {
        Command::GenData(args) => commands::gen_data::run(args, &config, seed),
        Command::Train(args) => commands::train::run(args, &config, seed),
        Command::Score(args) => commands::score::run(args, &config, seed),
        Command::Eval(cmd) => commands::eval::run(cmd, &config),
    };

    match result {
        Ok(()) => std::process::exit(EXIT_OK),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(err.exit_code());
        }
    }
}

/// An error carrying its intended process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn usage(err: impl Into<anyhow::Error>) -> CliError {
        CliError {
            code: EXIT_USAGE,
            source: err.into(),
        }
    }

    pub fn data(err: impl Into<anyhow::Error>) -> CliError {
        CliError {
            code: EXIT_DATA,
            source: err.into(),
        }
    }

    pub fn runtime(err: impl Into<anyhow::Error>) -> CliError {
        CliError {
            code: EXIT_RUNTIME,
            source: err.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.source)
    }
}
