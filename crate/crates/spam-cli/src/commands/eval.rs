//! `spam eval`: the plausibility and faithfulness protocols over score
//! tables.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args as ClapArgs, Subcommand};
use spam_stats::faithfulness::render_faithfulness_table;
use spam_stats::plausibility::render_plausibility;
use spam_stats::{faithfulness_report, plausibility_report, MosTable, ScoreTable};

use crate::commands::composite_id;
use crate::config::RunConfig;
use crate::CliError;

#[derive(Subcommand)]
pub enum EvalCommand {
    /// Correlate variant-level scores against a MOS table.
    Plausibility(PlausibilityArgs),
    /// Adherence rate and paired t-tests over a score table.
    Faithfulness(FaithfulnessArgs),
}

#[derive(ClapArgs)]
pub struct PlausibilityArgs {
    /// Score table CSV (item_id,variant,variant_idx,score).
    #[arg(long)]
    scores: PathBuf,

    /// MOS table CSV (item_id,mos) keyed by composite variant ids.
    #[arg(long)]
    mos: PathBuf,

    /// Directory for report files; none written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ClapArgs)]
pub struct FaithfulnessArgs {
    /// Score table CSV (item_id,variant,variant_idx,score).
    #[arg(long)]
    scores: PathBuf,

    /// Significance level for the paired t-tests.
    #[arg(long)]
    alpha: Option<f64>,

    /// Directory for report files; none written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cmd: EvalCommand, config: &RunConfig) -> Result<(), CliError> {
    match cmd {
        EvalCommand::Plausibility(args) => plausibility(args),
        EvalCommand::Faithfulness(args) => faithfulness(args, config),
    }
}

fn plausibility(args: PlausibilityArgs) -> Result<(), CliError> {
    let table = ScoreTable::read_csv(&args.scores).map_err(CliError::data)?;
    let mos = MosTable::read_csv(&args.mos).map_err(CliError::data)?;
    let scores: BTreeMap<String, f64> = table
        .rows
        .iter()
        .map(|r| (composite_id(&r.item_id, r.variant, r.variant_idx), r.score))
        .collect();
    let report = plausibility_report(&scores, &mos).map_err(CliError::data)?;
    print!("{}", render_plausibility("scores", &report));
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)
            .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot create {}: {e}", out.display())))?;
        std::fs::write(
            out.join("plausibility.json"),
            serde_json::to_string_pretty(&report).expect("report serializes"),
        )
        .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot write report: {e}")))?;
        std::fs::write(
            out.join("plausibility.txt"),
            render_plausibility("scores", &report),
        )
        .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot write report: {e}")))?;
    }
    Ok(())
}

fn faithfulness(args: FaithfulnessArgs, config: &RunConfig) -> Result<(), CliError> {
    let table = ScoreTable::read_csv(&args.scores).map_err(CliError::data)?;
    let alpha = args.alpha.unwrap_or(config.eval.alpha);
    let report = faithfulness_report(&table, alpha).map_err(CliError::data)?;
    print!("{}", render_faithfulness_table("scores", &report));
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)
            .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot create {}: {e}", out.display())))?;
        std::fs::write(
            out.join("faithfulness.json"),
            serde_json::to_string_pretty(&report).expect("report serializes"),
        )
        .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot write report: {e}")))?;
        std::fs::write(
            out.join("faithfulness.txt"),
            render_faithfulness_table("scores", &report),
        )
        .map_err(|e| CliError::runtime(anyhow::anyhow!("cannot write report: {e}")))?;
    }
    Ok(())
}
