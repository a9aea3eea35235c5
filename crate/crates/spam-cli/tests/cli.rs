//! Black-box tests of the `spam` binary: exit codes, determinism and
//! file outputs.

use std::path::Path;
use std::process::Command;

fn spam() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spam"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn spam");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn exit_code(cmd: &mut Command) -> i32 {
    cmd.output().expect("spawn spam").status.code().unwrap_or(-1)
}

fn gen(dir: &Path, n: usize, seed: u64) -> String {
    run_ok(spam()
        .arg("gen-data")
        .arg("--out")
        .arg(dir)
        .arg("--n")
        .arg(n.to_string())
        .arg("--seed")
        .arg(seed.to_string()))
}

#[test]
fn gen_data_writes_expected_files_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = gen(dir.path(), 30, 7);
    assert!(stdout.contains("wrote 30 records"));
    assert!(dir.path().join("manifest.jsonl").is_file());
    assert!(dir.path().join("audio").is_dir());
    assert!(dir.path().join("generation_spec.json").is_file());
    let manifest = spam_core::read_manifest(&dir.path().join("manifest.jsonl")).unwrap();
    assert_eq!(manifest.records.len(), 30);
    let has_test = manifest
        .records
        .iter()
        .any(|r| r.split == spam_core::Split::Test);
    assert_eq!(dir.path().join("variants.jsonl").is_file(), has_test);
    assert_eq!(dir.path().join("mos_standin.csv").is_file(), has_test);
}

#[test]
fn gen_data_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    gen(a.path(), 12, 5);
    gen(b.path(), 12, 5);
    let read = |p: &Path, name: &str| std::fs::read(p.join(name)).unwrap();
    assert_eq!(read(a.path(), "manifest.jsonl"), read(b.path(), "manifest.jsonl"));
    assert_eq!(read(a.path(), "variants.jsonl"), read(b.path(), "variants.jsonl"));
    assert_eq!(read(a.path(), "mos_standin.csv"), read(b.path(), "mos_standin.csv"));
    let manifest = spam_core::read_manifest(&a.path().join("manifest.jsonl")).unwrap();
    for rec in &manifest.records {
        assert_eq!(
            read(a.path(), &rec.audio_path),
            read(b.path(), &rec.audio_path),
            "audio differs for {}",
            rec.item_id
        );
    }
}

#[test]
fn gen_data_n_zero_gives_empty_manifest_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = gen(dir.path(), 0, 1);
    assert!(stdout.contains("wrote 0 records"));
    let manifest = spam_core::read_manifest(&dir.path().join("manifest.jsonl")).unwrap();
    assert!(manifest.records.is_empty());
}

fn train(dir: &Path, ckpt: &Path, max_steps: usize) -> String {
    run_ok(spam()
        .arg("train")
        .arg("--data")
        .arg(dir)
        .arg("--out")
        .arg(ckpt)
        .arg("--max-steps")
        .arg(max_steps.to_string())
        .arg("--seed")
        .arg("3")
        .arg("--deterministic"))
}

#[test]
fn train_then_score_flow_works_end_to_end() {
    let data = tempfile::tempdir().unwrap();
    gen(data.path(), 40, 11);
    let out = tempfile::tempdir().unwrap();
    let ckpt = out.path().join("model.ckpt");
    let stdout = train(data.path(), &ckpt, 2);
    assert!(stdout.contains("trained"));
    assert!(ckpt.is_file());
    assert!(out.path().join("model.metrics.jsonl").is_file());
    assert!(out.path().join("model.config.toml").is_file());

    // deterministic retrain gives identical checkpoint bytes
    let ckpt2 = out.path().join("model2.ckpt");
    train(data.path(), &ckpt2, 2);
    assert_eq!(std::fs::read(&ckpt).unwrap(), std::fs::read(&ckpt2).unwrap());

    // single-pair mode: prints one parseable score in [-1, 1], twice the same
    let manifest = spam_core::read_manifest(&data.path().join("manifest.jsonl")).unwrap();
    let rec = &manifest.records[0];
    let audio = data.path().join(&rec.audio_path);
    let mut score_cmd = || {
        run_ok(spam()
            .arg("score")
            .arg("--checkpoint")
            .arg(&ckpt)
            .arg("--audio")
            .arg(&audio)
            .arg("--transcript")
            .arg(&rec.transcript)
            .arg("--prompt")
            .arg(&rec.prompt))
    };
    let s1: f64 = score_cmd().trim().parse().unwrap();
    let s2: f64 = score_cmd().trim().parse().unwrap();
    assert_eq!(s1.to_bits(), s2.to_bits());
    assert!((-1.0..=1.0).contains(&s1));

    // batch mode: items x 21 rows, all finite and in range
    let scores_csv = out.path().join("scores.csv");
    let stdout = run_ok(spam()
        .arg("score")
        .arg("--checkpoint")
        .arg(&ckpt)
        .arg("--manifest")
        .arg(data.path().join("manifest.jsonl"))
        .arg("--variants")
        .arg(data.path().join("variants.jsonl"))
        .arg("--out")
        .arg(&scores_csv));
    assert!(stdout.contains("score rows"));
    let table = spam_stats::ScoreTable::read_csv(&scores_csv).unwrap();
    let n_items = spam_datagen::read_variants(&data.path().join("variants.jsonl"))
        .unwrap()
        .len();
    assert_eq!(table.rows.len(), n_items * 21);
    assert!(table.rows.iter().all(|r| (-1.0..=1.0).contains(&r.score)));

    // faithfulness eval consumes the table and prints the summary row
    let reports = out.path().join("reports");
    let stdout = run_ok(spam()
        .arg("eval")
        .arg("faithfulness")
        .arg("--scores")
        .arg(&scores_csv)
        .arg("--out")
        .arg(&reports));
    assert!(stdout.contains("AR"));
    assert!(reports.join("faithfulness.json").is_file());
    assert!(reports.join("faithfulness.txt").is_file());

    // plausibility eval against the generated MOS stand-in
    let stdout = run_ok(spam()
        .arg("eval")
        .arg("plausibility")
        .arg("--scores")
        .arg(&scores_csv)
        .arg("--mos")
        .arg(data.path().join("mos_standin.csv"))
        .arg("--out")
        .arg(&reports));
    assert!(stdout.contains("LCC"));
    assert!(reports.join("plausibility.json").is_file());
}

#[test]
fn missing_manifest_is_a_data_error_without_partial_checkpoint() {
    let empty = tempfile::tempdir().unwrap();
    let ckpt = empty.path().join("never.ckpt");
    let code = exit_code(spam()
        .arg("train")
        .arg("--data")
        .arg(empty.path().join("nope"))
        .arg("--out")
        .arg(&ckpt));
    assert_eq!(code, 2);
    assert!(!ckpt.exists());
}

#[test]
fn usage_errors_exit_one() {
    // score without any mode flags
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), 12, 2);
    let ckpt = dir.path().join("m.ckpt");
    train(dir.path(), &ckpt, 1);
    let code = exit_code(spam().arg("score").arg("--checkpoint").arg(&ckpt));
    assert_eq!(code, 1);
}

#[test]
fn malformed_score_csv_header_is_a_data_error_naming_the_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "item_id,kind,variant_idx,score\n").unwrap();
    let out = spam()
        .arg("eval")
        .arg("faithfulness")
        .arg("--scores")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("variant"), "stderr: {stderr}");
}

#[test]
fn separable_table_reports_perfect_ar() {
    // construct a separable score table by hand
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scores.csv");
    let mut text = String::from("item_id,variant,variant_idx,score\n");
    for item in 0..5 {
        text.push_str(&format!("i{item},original,0,0.9\n"));
        for idx in 0..3 {
            text.push_str(&format!("i{item},positive,{idx},0.{}\n", 85 + idx));
            text.push_str(&format!("i{item},negative,{idx},0.{}\n", 10 + idx));
        }
    }
    std::fs::write(&csv, text).unwrap();
    let stdout = run_ok(spam().arg("eval").arg("faithfulness").arg("--scores").arg(&csv));
    assert!(stdout.contains("1.000"), "stdout: {stdout}");
}

#[test]
fn plausibility_of_scores_equal_to_mos_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("scores.csv");
    let mos = dir.path().join("mos.csv");
    let mut s = String::from("item_id,variant,variant_idx,score\n");
    let mut m = String::from("item_id,mos\n");
    for item in 0..6 {
        let value = 1.0 + item as f64 * 0.5;
        s.push_str(&format!("i{item},original,0,{value}\n"));
        m.push_str(&format!("i{item}#original#0,{value}\n"));
    }
    std::fs::write(&scores, s).unwrap();
    std::fs::write(&mos, m).unwrap();
    let stdout = run_ok(spam()
        .arg("eval")
        .arg("plausibility")
        .arg("--scores")
        .arg(&scores)
        .arg("--mos")
        .arg(&mos));
    assert!(stdout.contains("1.000"), "stdout: {stdout}");
}
