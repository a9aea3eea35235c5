//! Timing probe: step cost, convergence and test-set adherence rate.

use spam_datagen::{
    generate_corpus, make_variants, prompt_vocabulary, render_prompt, GenerationSpec,
};
use spam_model::scorer::similarity;
use spam_model::{train, ModelConfig, Scorer, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_items: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(120);
    let steps: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(30);
    let batch: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(32);
    let lr: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(2e-3);

    let dir = tempfile::tempdir().unwrap();
    let spec = GenerationSpec {
        n_items,
        seed: 7,
        ..GenerationSpec::default()
    };
    let t0 = std::time::Instant::now();
    let manifest = generate_corpus(&spec, dir.path()).unwrap();
    eprintln!("gen: {:?}", t0.elapsed());

    let t0 = std::time::Instant::now();
    let features = spam_model::trainer::prepare_features(
        &dir.path().join("manifest.jsonl"),
        &manifest.records,
    )
    .unwrap();
    eprintln!("features: {:?} ({} items)", t0.elapsed(), features.len());

    let config = TrainConfig {
        max_steps: steps,
        eval_interval: 50,
        batch_size: batch,
        lr,
        warmup_steps: 50,
        ..TrainConfig::default()
    };
    let t0 = std::time::Instant::now();
    let outcome = train(
        &manifest.records,
        &features,
        prompt_vocabulary(),
        ModelConfig::default(),
        &config,
        &|key: &spam_core::StyleKey, seed: u64| render_prompt(key, seed),
    )
    .unwrap();
    let dt = t0.elapsed();
    eprintln!(
        "train: {:?} total, {:.3} s/step over {} steps; dev {:.4} -> {:.4}",
        dt,
        dt.as_secs_f64() / outcome.steps_run as f64,
        outcome.steps_run,
        outcome.initial_dev_loss,
        outcome.best_dev_loss
    );
    for row in outcome.metrics.iter().step_by(50) {
        eprintln!(
            "  step {:>4}: L={:.4} Lcon={:.4} Lp={:.4} Lv={:.4} Le={:.4}",
            row.step, row.total, row.contrastive, row.pitch, row.speed, row.energy
        );
    }

    // test-set AR
    let t0 = std::time::Instant::now();
    let scorer = Scorer::from_checkpoint(&outcome.checkpoint).unwrap();
    let test: Vec<_> = manifest
        .records
        .iter()
        .filter(|r| r.split == spam_core::Split::Test)
        .collect();
    let mut per_item_ar = Vec::new();
    let mut attr_win: std::collections::HashMap<spam_datagen::Attribute, (f64, f64)> =
        std::collections::HashMap::new();
    for rec in &test {
        let set = make_variants(rec, spec.seed).unwrap();
        let wave = spam_core::wav::read_wav(&spam_core::Manifest::resolve_audio(
            &dir.path().join("manifest.jsonl"),
            rec,
        ))
        .unwrap();
        let speech = scorer.embed_speech(&rec.transcript, &wave).unwrap();
        let score =
            |p: &str| similarity(&speech.vector, &scorer.embed_prompt(p).unwrap()).unwrap();
        let pos: Vec<f64> = set.positive_prompts.iter().map(|p| score(p)).collect();
        let negs: Vec<(f64, Vec<spam_datagen::Attribute>)> = set
            .negative_prompts
            .iter()
            .map(|p| {
                (
                    score(p),
                    spam_datagen::flipped_attributes(&rec.style_key, p).unwrap(),
                )
            })
            .collect();
        let mut credit = 0.0;
        for &p in &pos {
            for (n, flips) in &negs {
                let c = if p > *n {
                    1.0
                } else if p == *n {
                    0.5
                } else {
                    0.0
                };
                credit += c;
                for f in flips {
                    let e = attr_win.entry(*f).or_insert((0.0, 0.0));
                    e.0 += c;
                    e.1 += 1.0;
                }
            }
        }
        per_item_ar.push(credit / (pos.len() * negs.len()) as f64);
    }
    let ar = per_item_ar.iter().sum::<f64>() / per_item_ar.len() as f64;
    eprintln!(
        "scoring: {:?}; AR over {} test items = {:.4}",
        t0.elapsed(),
        test.len(),
        ar
    );
    for (attr, (win, total)) in &attr_win {
        eprintln!("  AR[{attr:?} flipped] = {:.4} ({total} pairs)", win / total);
    }
}
