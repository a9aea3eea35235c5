//! `spam train`: fit the scorer on a generated corpus.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use spam_datagen::{prompt_vocabulary, render_prompt};
use spam_model::{save_checkpoint, train, trainer::prepare_features};

use crate::config::RunConfig;
use crate::CliError;

#[derive(ClapArgs)]
pub struct Args {
    /// Data directory produced by gen-data (holds manifest.jsonl).
    #[arg(long)]
    data: PathBuf,

    /// Checkpoint output path; defaults to the config's paths.checkpoint.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the configured maximum number of optimization steps.
    #[arg(long)]
    max_steps: Option<usize>,
}

pub fn run(args: Args, config: &RunConfig, seed: Option<u64>) -> Result<(), CliError> {
    let manifest_path = args.data.join("manifest.jsonl");
    let manifest = spam_core::read_manifest(&manifest_path).map_err(CliError::data)?;

    let seed = seed.unwrap_or(0);
    let mut train_config = config.train_config(seed);
    if let Some(max_steps) = args.max_steps {
        train_config.max_steps = max_steps;
    }
    let model_config = config.model_config(seed ^ 0x5eed);

    let features =
        prepare_features(&manifest_path, &manifest.records).map_err(CliError::data)?;

    let outcome = train(
        &manifest.records,
        &features,
        prompt_vocabulary(),
        model_config,
        &train_config,
        &|key: &spam_core::StyleKey, s: u64| render_prompt(key, s),
    )
    .map_err(CliError::runtime)?;

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| config.paths.checkpoint.clone());
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot create {}: {e}", parent.display())))?;
        }
    }
    save_checkpoint(&outcome.checkpoint, &out).map_err(CliError::runtime)?;

    // metrics log: one JSON record per step
    let metrics_path = out.with_extension("metrics.jsonl");
    let mut log = String::new();
    for row in &outcome.metrics {
        log.push_str(&serde_json::to_string(row).expect("metrics row serializes"));
        log.push('\n');
    }
    std::fs::write(&metrics_path, log)
        .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot write metrics: {e}")))?;

    // resolved run config for provenance
    let mut resolved = config.clone();
    resolved.seed = Some(seed);
    resolved.train.max_steps = train_config.max_steps;
    resolved
        .write_resolved(&out.with_extension("config.toml"))
        .map_err(CliError::runtime)?;

    println!(
        "trained {} steps (dev contrastive loss {:.4} -> {:.4} at step {}), checkpoint -> {}",
        outcome.steps_run,
        outcome.initial_dev_loss,
        outcome.best_dev_loss,
        outcome.checkpoint.train_meta.best_step,
        out.display()
    );
    Ok(())
}
