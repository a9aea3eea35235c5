//! `spam gen-data`: corpus, manifest, variants and MOS stand-in.

use std::path::PathBuf;

use clap::Args as ClapArgs;
use spam_core::Split;
use spam_datagen::{generate_corpus, make_variants, write_variants, GenerationSpec, VariantSet};
use spam_stats::{MosRow, MosTable, Variant};

use crate::commands::{composite_id, mos_standin};
use crate::config::RunConfig;
use crate::CliError;

#[derive(ClapArgs)]
pub struct Args {
    /// Output directory for audio, manifest, variants and MOS stand-in.
    #[arg(long)]
    out: PathBuf,

    /// Number of items to generate.
    #[arg(long)]
    n: usize,

    /// Generation spec file (JSON); defaults are used when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
}

pub fn run(args: Args, _config: &RunConfig, seed: Option<u64>) -> Result<(), CliError> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::usage(anyhow::anyhow!("cannot read spec {}: {e}", path.display()))
            })?;
            serde_json::from_str::<GenerationSpec>(&text).map_err(|e| {
                CliError::data(anyhow::anyhow!("bad spec {}: {e}", path.display()))
            })?
        }
        None => GenerationSpec::default(),
    };
    spec.n_items = args.n;
    if let Some(seed) = seed {
        spec.seed = seed;
    }

    let manifest = generate_corpus(&spec, &args.out).map_err(CliError::data)?;

    // variants + MOS stand-in for the held-out test items
    let mut variant_sets: Vec<VariantSet> = Vec::new();
    let mut mos_rows: Vec<MosRow> = Vec::new();
    for rec in manifest.records.iter().filter(|r| r.split == Split::Test) {
        let set = make_variants(rec, spec.seed).map_err(CliError::data)?;
        mos_rows.push(MosRow {
            item_id: composite_id(&rec.item_id, Variant::Original, 0),
            mos: 5.0,
        });
        for (i, _) in set.positive_prompts.iter().enumerate() {
            mos_rows.push(MosRow {
                item_id: composite_id(&rec.item_id, Variant::Positive, i as u32),
                mos: 5.0,
            });
        }
        for (i, neg) in set.negative_prompts.iter().enumerate() {
            mos_rows.push(MosRow {
                item_id: composite_id(&rec.item_id, Variant::Negative, i as u32),
                mos: mos_standin(rec, neg).map_err(CliError::data)?,
            });
        }
        variant_sets.push(set);
    }
    if !variant_sets.is_empty() {
        write_variants(&variant_sets, &args.out.join("variants.jsonl"))
            .map_err(CliError::runtime)?;
        MosTable::new(mos_rows)
            .map_err(CliError::runtime)?
            .write_csv(&args.out.join("mos_standin.csv"))
            .map_err(CliError::runtime)?;
    }

    // resolved spec for provenance
    std::fs::write(
        args.out.join("generation_spec.json"),
        serde_json::to_string_pretty(&spec).expect("spec serializes"),
    )
    .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot write resolved spec: {e}")))?;

    let count = |split: Split| {
        manifest
            .records
            .iter()
            .filter(|r| r.split == split)
            .count()
    };
    println!(
        "wrote {} records ({} train / {} dev / {} test), {} variant sets -> {}",
        manifest.records.len(),
        count(Split::Train),
        count(Split::Dev),
        count(Split::Test),
        variant_sets.len(),
        args.out.display()
    );
    Ok(())
}
