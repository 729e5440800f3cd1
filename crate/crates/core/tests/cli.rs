use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eeg_pnn::eval::EvalReport;
use eeg_pnn::features::read_feature_csv;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eeg-pnn"));
    cmd.env_remove("EEG_PNN_DATA");
    cmd
}

fn manifest() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic/manifest.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Realizes the shipped manifest as Bonn-format directories.
fn realized() -> TempDir {
    let dir = TempDir::new().unwrap();
    let out = run(&["synth", "--manifest", p(&manifest()), "--realize", p(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir
}

#[test]
fn extract_writes_one_row_per_file() {
    let corpus = realized();
    let csv = corpus.path().join("A.csv");
    let out = run(&["extract", "--set", "A", "--in", p(&corpus.path().join("A")), "--out", p(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = read_feature_csv(&csv).unwrap();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.label == "A"));
    assert_eq!(rows[0].source_id, "Z001");
    let header = fs::read_to_string(&csv).unwrap();
    assert_eq!(header.lines().next().unwrap().split(',').count(), 40);
}

#[test]
fn extract_from_manifest_matches_extract_from_files() {
    let corpus = realized();
    let a = corpus.path().join("a.csv");
    let b = corpus.path().join("b.csv");
    run(&["extract", "--set", "C", "--in", p(&corpus.path().join("C")), "--out", p(&a)]);
    run(&["extract", "--set", "C", "--manifest", p(&manifest()), "--out", p(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn extract_empty_dir_gives_header_only() {
    let dir = TempDir::new().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let csv = dir.path().join("e.csv");
    let out = run(&["extract", "--set", "B", "--in", p(&dir.path().join("empty")), "--out", p(&csv)]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1);
}

#[test]
fn corrupt_file_exits_2_and_names_it() {
    let dir = TempDir::new().unwrap();
    let set = dir.path().join("Z");
    fs::create_dir(&set).unwrap();
    let body: String = (0..4097).map(|i| if i == 10 { "x1\n".to_string() } else { format!("{i}\n") }).collect();
    fs::write(set.join("Z042.txt"), body).unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(&["extract", "--set", "A", "--in", p(&set), "--out", p(&csv)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Z042.txt"), "{}", stderr(&out));
    assert!(!csv.exists(), "no partial output");
}

#[test]
fn cv_on_synthetic_corpus_is_perfect() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&["cv", "--experiment", "1", "--manifest", p(&manifest()), "--out", p(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("accuracy 1.0000"));
    let r: EvalReport = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.accuracy, 1.0);
    assert_eq!(r.confusion, vec![vec![50, 0], vec![0, 50]]);
    assert_eq!(r.experiment, Some(1));
    assert!(r.timing.is_none());
}

#[test]
fn cv_from_data_dir_env_and_features_agree() {
    let corpus = realized();
    let r1 = corpus.path().join("r1.json");
    let r2 = corpus.path().join("r2.json");
    let out = bin()
        .env("EEG_PNN_DATA", corpus.path())
        .args(["cv", "--experiment", "4", "--out", p(&r1)])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let mut csvs = Vec::new();
    for set in ["C", "D"] {
        let csv = corpus.path().join(format!("{set}.csv"));
        run(&["extract", "--set", set, "--in", p(&corpus.path().join(set)), "--out", p(&csv)]);
        csvs.push(csv);
    }
    let out = run(&["cv", "--experiment", "4", "--features", p(&csvs[0]), p(&csvs[1]), "--out", p(&r2)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let a: EvalReport = serde_json::from_str(&fs::read_to_string(&r1).unwrap()).unwrap();
    let b: EvalReport = serde_json::from_str(&fs::read_to_string(&r2).unwrap()).unwrap();
    assert_eq!(a.predictions, b.predictions);
    assert_eq!(a.n_samples, 50);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut bodies = Vec::new();
    for i in 0..2 {
        let report = dir.path().join(format!("r{i}.json"));
        let sweep = dir.path().join(format!("s{i}.csv"));
        run(&["cv", "--experiment", "1", "--manifest", p(&manifest()), "--lowpass", "off", "--out", p(&report)]);
        run(&["sweep", "--experiment", "1", "--manifest", p(&manifest()), "--spreads", "0.05,0.1", "--out", p(&sweep)]);
        bodies.push((fs::read(&report).unwrap(), fs::read(&sweep).unwrap()));
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn single_thread_mode_records_timing() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&["--threads", "1", "cv", "--experiment", "1", "--manifest", p(&manifest()), "--out", p(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: EvalReport = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.timing.unwrap().per_fold_classify_seconds.len(), 100);
}

#[test]
fn usage_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let out = run(&["cv", "--experiment", "5", "--manifest", p(&manifest()), "--out", p(&report)]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("--experiment"));
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn missing_data_exits_3() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    // the synthetic corpus has no set E
    let out = run(&["cv", "--experiment", "2", "--manifest", p(&manifest()), "--out", p(&report)]);
    assert_eq!(code(&out), 3);
    let out = run(&["cv", "--experiment", "1", "--data-dir", p(dir.path()), "--out", p(&report)]);
    assert_eq!(code(&out), 3);
    let out = run(&["cv", "--experiment", "1", "--out", p(&report)]);
    assert_eq!(code(&out), 3);
    assert!(!report.exists());
}

#[test]
fn train_then_classify() {
    let corpus = realized();
    let model = corpus.path().join("m.json");
    let out = run(&["train", "--experiment", "1", "--data-dir", p(corpus.path()), "--out", p(&model)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for (file, expected) in [("A/Z003.txt", "0 normal"), ("D/F010.txt", "1 interictal")] {
        let out = run(&["classify", "--model", p(&model), "--segment", p(&corpus.path().join(file))]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert_eq!(stdout.lines().next().unwrap(), expected);
    }
}

#[test]
fn held_out_ictal_segment_is_classified_ictal() {
    // the model never sees N025; the manifest generated it as an ictal mixture
    let corpus = realized();
    let held = corpus.path().join("held");
    fs::create_dir(&held).unwrap();
    fs::rename(corpus.path().join("C/N025.txt"), held.join("N025.txt")).unwrap();
    let model = corpus.path().join("m.json");
    run(&["train", "--experiment", "1", "--data-dir", p(corpus.path()), "--out", p(&model)]);
    let out = run(&["classify", "--model", p(&model), "--segment", p(&held.join("N025.txt"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("1 "));
}

#[test]
fn classify_errors() {
    let corpus = realized();
    let model = corpus.path().join("m.json");
    run(&["train", "--experiment", "1", "--manifest", p(&manifest()), "--out", p(&model)]);

    let full = fs::read_to_string(corpus.path().join("A/Z001.txt")).unwrap();
    let truncated = corpus.path().join("short.txt");
    fs::write(&truncated, full.lines().take(2000).collect::<Vec<_>>().join("\n")).unwrap();
    let out = run(&["classify", "--model", p(&model), "--segment", p(&truncated)]);
    assert_eq!(code(&out), 2);

    let mut value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&model).unwrap()).unwrap();
    value["n_features"] = 40.into();
    let bad = corpus.path().join("bad.json");
    fs::write(&bad, value.to_string()).unwrap();
    let out = run(&["classify", "--model", p(&bad), "--segment", p(&corpus.path().join("A/Z001.txt"))]);
    assert_eq!(code(&out), 4);
}

#[test]
fn sweep_writes_csv_and_plot_data() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = run(&["sweep", "--experiment", "1", "--manifest", p(&manifest()), "--spreads", "0.5,0.1", "--out", p(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(&csv).unwrap(), "spread,accuracy\n0.5,1\n0.1,1\n");
    assert_eq!(
        fs::read_to_string(dir.path().join("sweep.dat")).unwrap(),
        "# spread accuracy\n0.5 1\n0.1 1\n"
    );
}

#[test]
fn synth_default_manifest_matches_shipped_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.json");
    let out = run(&["synth", "--write-manifest", p(&path)]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(&path).unwrap(), fs::read(manifest()).unwrap());
}
