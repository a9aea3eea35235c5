//! `spam score`: one pair, or a manifest's test items against all
//! their prompt variants.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use spam_core::{read_manifest, Manifest};
use spam_datagen::read_variants;
use spam_model::{load_checkpoint, scorer::similarity, Scorer};
use spam_stats::{ScoreRow, ScoreTable, Variant};

use crate::config::RunConfig;
use crate::CliError;

#[derive(ClapArgs)]
pub struct Args {
    /// Trained checkpoint; defaults to the config's paths.checkpoint.
    #[arg(long)]
    checkpoint: Option<PathBuf>,

    /// Single-pair mode: audio file to score.
    #[arg(long, requires = "prompt", conflicts_with_all = ["manifest", "variants"])]
    audio: Option<PathBuf>,

    /// Single-pair mode: style prompt text.
    #[arg(long)]
    prompt: Option<String>,

    /// Single-pair mode: transcript of the audio (may be empty).
    #[arg(long, default_value = "")]
    transcript: String,

    /// Batch mode: manifest whose test split gets scored.
    #[arg(long, requires = "variants")]
    manifest: Option<PathBuf>,

    /// Batch mode: variants file from gen-data.
    #[arg(long)]
    variants: Option<PathBuf>,

    /// Batch mode: output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args, config: &RunConfig, _seed: Option<u64>) -> Result<(), CliError> {
    let ckpt_path = args
        .checkpoint
        .clone()
        .unwrap_or_else(|| config.paths.checkpoint.clone());
    let checkpoint = load_checkpoint(&ckpt_path).map_err(CliError::data)?;
    let scorer = Scorer::from_checkpoint(&checkpoint).map_err(CliError::data)?;

    match (&args.audio, &args.manifest) {
        (Some(audio), None) => {
            let prompt = args.prompt.as_deref().expect("clap enforces prompt");
            let wave = spam_core::wav::read_wav(audio).map_err(CliError::data)?;
            let score = scorer
                .score_pair(&args.transcript, &wave, prompt)
                .map_err(CliError::runtime)?;
            println!("{score}");
            Ok(())
        }
        (None, Some(manifest_path)) => {
            let variants_path = args.variants.as_ref().expect("clap enforces variants");
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from("scores.csv"));
            let manifest = read_manifest(manifest_path).map_err(CliError::data)?;
            let variant_sets = read_variants(variants_path).map_err(CliError::data)?;
            let table =
                score_variants(&scorer, &manifest, manifest_path, &variant_sets)?;
            table.write_csv(&out).map_err(CliError::runtime)?;
            println!("wrote {} score rows -> {}", table.rows.len(), out.display());
            Ok(())
        }
        _ => Err(CliError::usage(anyhow::anyhow!(
            "expected either --audio with --prompt, or --manifest with --variants"
        ))),
    }
}

/// Scores every item in the variants file: 1 original + its positives
/// and negatives. Audio is embedded once per item and reused across
/// the 21 prompts, so memory stays flat in corpus size.
pub fn score_variants(
    scorer: &Scorer,
    manifest: &Manifest,
    manifest_path: &std::path::Path,
    variant_sets: &[spam_datagen::VariantSet],
) -> Result<ScoreTable, CliError> {
    let mut rows = Vec::new();
    for set in variant_sets {
        let rec = manifest
            .records
            .iter()
            .find(|r| r.item_id == set.item_id)
            .ok_or_else(|| {
                CliError::data(anyhow::anyhow!(
                    "variants reference unknown item {}",
                    set.item_id
                ))
            })?;
        let wave = spam_core::wav::read_wav(&Manifest::resolve_audio(manifest_path, rec))
            .map_err(CliError::data)?;
        let speech = scorer
            .embed_speech(&rec.transcript, &wave)
            .map_err(CliError::runtime)?;

        let mut push = |variant: Variant, idx: u32, prompt: &str| -> Result<(), CliError> {
            let b = scorer.embed_prompt(prompt).map_err(CliError::runtime)?;
            let score = similarity(&speech.vector, &b).map_err(CliError::runtime)?;
            rows.push(ScoreRow {
                item_id: set.item_id.clone(),
                variant,
                variant_idx: idx,
                score,
            });
            Ok(())
        };
        push(Variant::Original, 0, &set.original_prompt)?;
        for (i, p) in set.positive_prompts.iter().enumerate() {
            push(Variant::Positive, i as u32, p)?;
        }
        for (i, n) in set.negative_prompts.iter().enumerate() {
            push(Variant::Negative, i as u32, n)?;
        }
    }
    Ok(ScoreTable::new(rows))
}
