//! End-to-end tests of the `pargnn` binary: the full
//! generate → train → eval → report pipeline, exit codes, and
//! reproducibility of every artifact.

use std::path::Path;
use std::process::{Command, Output};

fn pargnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pargnn"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

/// Byte-for-byte directory comparison (flat directories).
fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn generate_small(dir: &Path, seed: &str) {
    let out = pargnn(&[
        "generate",
        "--out",
        dir.to_str().unwrap(),
        "--count",
        "20",
        "--min-n",
        "5",
        "--max-n",
        "12",
        "--split",
        "0.7",
        "--seed",
        seed,
    ]);
    assert_success(&out);
}

#[test]
fn generate_is_reproducible_and_reports_the_split() {
    let root = tempfile::tempdir().unwrap();
    let a = root.path().join("a");
    let b = root.path().join("b");
    generate_small(&a, "11");
    generate_small(&b, "11");
    assert_eq!(read_dir_bytes(&a), read_dir_bytes(&b));
    // 20 games at fraction 0.7 → 14 train / 6 test.
    assert_eq!(
        read_dir_bytes(&a).len(),
        41,
        "20 games + 20 solutions + manifest"
    );

    let c = root.path().join("c");
    generate_small(&c, "12");
    assert_ne!(read_dir_bytes(&a), read_dir_bytes(&c), "seed must matter");

    let stdout = String::from_utf8(
        pargnn(&[
            "generate",
            "--out",
            root.path().join("d").to_str().unwrap(),
            "--count",
            "20",
            "--min-n",
            "5",
            "--max-n",
            "12",
            "--split",
            "0.7",
            "--seed",
            "11",
        ])
        .stdout,
    )
    .unwrap();
    assert!(stdout.contains("14 train / 6 test"), "got {stdout:?}");
}

#[test]
fn usage_errors_exit_with_code_one() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("x");
    let base = ["generate", "--out", dir.to_str().unwrap()];

    // count 0
    let out = pargnn(&[&base[..], &["--count", "0"]].concat());
    assert_eq!(exit_code(&out), 1);
    // split outside (0, 1)
    let out = pargnn(&[&base[..], &["--count", "3", "--split", "1.0"]].concat());
    assert_eq!(exit_code(&out), 1);
    // min-n above max-n
    let out = pargnn(&[&base[..], &["--count", "3", "--min-n", "9", "--max-n", "4"]].concat());
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--min-n"));
    // unknown flag
    let out = pargnn(&[&base[..], &["--count", "3", "--frobnicate"]].concat());
    assert_eq!(exit_code(&out), 1);
    // unknown variant
    let out = pargnn(&[
        "train",
        "--data",
        "d",
        "--checkpoint",
        "c",
        "--variant",
        "mlp",
    ]);
    assert_eq!(exit_code(&out), 1);
    // bad dropout
    let out = pargnn(&[
        "train",
        "--data",
        "d",
        "--checkpoint",
        "c",
        "--dropout",
        "1.0",
    ]);
    assert_eq!(exit_code(&out), 1);

    // none of these created the dataset directory
    assert!(!dir.exists());
}

#[test]
fn data_errors_exit_with_code_two() {
    let root = tempfile::tempdir().unwrap();
    // missing dataset directory
    let out = pargnn(&[
        "train",
        "--data",
        root.path().join("nope").to_str().unwrap(),
        "--checkpoint",
        root.path().join("m.ckpt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    // missing checkpoint
    let data = root.path().join("data");
    generate_small(&data, "5");
    let out = pargnn(&[
        "eval",
        "--checkpoint",
        root.path().join("missing.ckpt").to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--out",
        root.path().join("r.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    // corrupt dataset: truncate one game file
    std::fs::write(data.join("g000003.pg"), "parity 0;\n").unwrap();
    let out = pargnn(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--checkpoint",
        root.path().join("m.ckpt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    // malformed report file
    let report = root.path().join("bad.txt");
    std::fs::write(&report, "not a report\n").unwrap();
    let out = pargnn(&["report", "--report", report.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn help_exits_cleanly() {
    let out = pargnn(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["generate", "train", "eval", "report"] {
        assert!(text.contains(sub), "help should mention {sub}");
    }
    let out = pargnn(&["generate", "--help"]);
    assert_eq!(exit_code(&out), 0);
}

fn train_toy(data: &Path, checkpoint: &Path, variant: &str, seed: &str, curve: Option<&Path>) {
    let mut args = vec![
        "train",
        "--data",
        data.to_str().unwrap(),
        "--checkpoint",
        checkpoint.to_str().unwrap(),
        "--variant",
        variant,
        "--layers",
        "2",
        "--width",
        "8",
        "--epochs",
        "1",
        "--seed",
        seed,
    ];
    let curve_arg;
    if let Some(path) = curve {
        curve_arg = path.to_str().unwrap().to_string();
        args.push("--loss-curve");
        args.push(&curve_arg);
    }
    let out = pargnn(&args);
    assert_success(&out);
}

#[test]
fn training_writes_reproducible_checkpoints_and_loss_curves() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    generate_small(&data, "21");

    let ckpt_a = root.path().join("a.ckpt");
    let ckpt_b = root.path().join("b.ckpt");
    let curve_a = root.path().join("a.csv");
    let curve_b = root.path().join("b.csv");
    train_toy(&data, &ckpt_a, "gcn", "3", Some(&curve_a));
    train_toy(&data, &ckpt_b, "gcn", "3", Some(&curve_b));
    assert_eq!(
        std::fs::read(&ckpt_a).unwrap(),
        std::fs::read(&ckpt_b).unwrap(),
        "same dataset and seed must yield identical checkpoints"
    );
    assert_eq!(
        std::fs::read(&curve_a).unwrap(),
        std::fs::read(&curve_b).unwrap()
    );

    let curve = std::fs::read_to_string(&curve_a).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("step,loss"));
    // 14 training games, one step each.
    assert_eq!(lines.count(), 14);

    let ckpt_c = root.path().join("c.ckpt");
    train_toy(&data, &ckpt_c, "gcn", "4", None);
    assert_ne!(
        std::fs::read(&ckpt_a).unwrap(),
        std::fs::read(&ckpt_c).unwrap(),
        "the seed must change the trained parameters"
    );
}

#[test]
fn the_two_variants_produce_different_tensor_sets() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    generate_small(&data, "22");
    let gcn = root.path().join("gcn.ckpt");
    let gat = root.path().join("gat.ckpt");
    train_toy(&data, &gcn, "gcn", "1", None);
    train_toy(&data, &gat, "gat", "1", None);

    let gcn_text = std::fs::read_to_string(&gcn).unwrap();
    let gat_text = std::fs::read_to_string(&gat).unwrap();
    assert!(!gcn_text.contains("message0.attention"));
    assert!(gat_text.contains("message0.attention"));
    assert!(gcn_text.contains("meta variant gcn"));
    assert!(gat_text.contains("meta variant gat"));
}

/// Drops the one line that may legitimately differ between two evaluation
/// runs (the wall-clock timing).
fn without_timing(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("timing_seconds "))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn full_pipeline_produces_consistent_artifacts() {
    let root = tempfile::tempdir().unwrap();
    let data = root.path().join("data");
    generate_small(&data, "23");
    let ckpt = root.path().join("model.ckpt");
    train_toy(&data, &ckpt, "gcn", "7", None);

    let report_a = root.path().join("report_a.txt");
    let report_b = root.path().join("report_b.txt");
    for report in [&report_a, &report_b] {
        let out = pargnn(&[
            "eval",
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--data",
            data.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ]);
        assert_success(&out);
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains("Model"), "eval prints the summary table");
        assert!(stdout.contains("majority baseline"));
    }
    let text_a = std::fs::read_to_string(&report_a).unwrap();
    let text_b = std::fs::read_to_string(&report_b).unwrap();
    assert_eq!(
        without_timing(&text_a),
        without_timing(&text_b),
        "evaluation must be deterministic apart from timing"
    );
    // The configuration (model + training + dataset) is echoed in the report.
    for needle in [
        "meta variant gcn",
        "meta message_layers 2",
        "meta train.seed 7",
        "meta dataset.seed 23",
        "meta dataset.split_fraction 0.7",
    ] {
        assert!(text_a.contains(needle), "report should contain {needle:?}");
    }

    // report: table to stdout, CSV and SVG on request.
    let csv_path = root.path().join("scatter.csv");
    let svg_path = root.path().join("scatter.svg");
    let out = pargnn(&[
        "report",
        "--report",
        report_a.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_success(&out);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("n_err=0"));
    assert!(table.contains("GCN"));

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("vertex_count,misclassified"));
    // 6 test games at this count and fraction.
    assert_eq!(lines.count(), 6);

    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<circle").count(), 6);
}
