mod support;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use padbench::formats::{read_assignment, read_listing, write_manifest};
use padbench::image_io::{load_image, save_image};
use padbench_core::dataset::{Half, Split};
use padbench_core::imaging::ImageBuffer;
use serde_json::Value;

fn padbench<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padbench")).args(args).env_remove("PADBENCH_LOG").output().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn eval_of_separable_scores_reports_zero_eer() {
    let o = padbench(&["eval", "--json", "--scores", p(&fixture("separable.csv"))]);
    let v = stdout_json(&o);
    assert_eq!(v["eer"], Value::from(0.0));
    for ap in ["bpcer10", "bpcer20", "bpcer100"] {
        assert_eq!(v[ap], Value::from(0.0));
        assert_eq!(v["saturated"][ap], Value::from(false));
    }
    assert_eq!(v["counts"]["0"], Value::from(4));
    assert_eq!(v["pais"], serde_json::json!([1, 2]));
    let table = v["apcer_table"].as_array().unwrap();
    assert_eq!(table.len(), 4);
    assert!(table.iter().all(|row| row["apcer"]["1"].is_number() && row["apcer"]["2"].is_number()));
}

#[test]
fn eval_human_output_is_an_aligned_table() {
    let o = padbench(&["eval", "--scores", p(&fixture("separable.csv"))]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("metric"));
    assert!(lines[1].starts_with("EER       0.0000"), "{text}");
    assert!(text.contains("apcer_1  apcer_2"));
}

#[test]
fn score_polarity_flips_the_decision() {
    let high = stdout_json(&padbench(&["eval", "--json", "--scores", p(&fixture("separable.csv"))]));
    let low = stdout_json(&padbench(&[
        "eval",
        "--json",
        "--score-polarity",
        "bona-fide-high",
        "--scores",
        p(&fixture("separable.csv")),
    ]));
    assert_eq!(high["eer"], Value::from(0.0));
    assert_eq!(low["eer"], Value::from(100.0));
}

#[test]
fn fid_of_identical_files_prints_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.pademb");
    let mut rng = padbench_core::rng::SplitMix64::new(3);
    let data = (0..40 * 8).map(|_| rng.next_f64() as f32).collect();
    let set = padbench_core::fid::EmbeddingSet::new(40, 8, data).unwrap();
    padbench::embeddings::write_embeddings(&set, &path).unwrap();
    let o = padbench(&["fid", "--a", p(&path), "--b", p(&path)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "0.000000\n");
}

#[test]
fn split_then_compose() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    write_manifest(&support::dataset_manifest(2), &manifest).unwrap();
    let rules = dir.path().join("print_rules.json");
    std::fs::write(&rules, padbench::rules::PRINT_RULES).unwrap();
    let assignment = dir.path().join("assignment.json");
    let o = padbench(&["split", "--json", "--manifest", p(&manifest), "--rules", p(&rules), "--task", "print", "--out", p(&assignment)]);
    let summary = stdout_json(&o);
    assert_eq!(summary["task"], Value::from("print"));

    let a = read_assignment(&assignment).unwrap();
    let test_ids: std::collections::BTreeSet<String> = a
        .subjects(Split::Test, Some(padbench_core::dataset::SourceDataset::Dlc2021))
        .into_iter()
        .map(|s| s.subject_id)
        .collect();
    assert_eq!(test_ids, ["00", "01"].map(String::from).into());

    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("assignment.json.config.json")).unwrap()).unwrap();
    assert_eq!(sidecar["command"], Value::from("split"));
    assert_eq!(sidecar["config"]["seed"], Value::from(0));
    assert_eq!(sidecar["config"]["task"], Value::from("print"));

    let listing = dir.path().join("half.csv");
    let o = padbench(&["compose", "--assignment", p(&assignment), "--mode", "real-half", "--out", p(&listing)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let half = read_listing(&listing).unwrap();
    let ta = a.frames.iter().filter(|f| f.half == Some(Half::TA)).count();
    assert_eq!(half.len(), ta);

    // Synthetic mode needs one generated file per T_B bona fide frame.
    let synth = dir.path().join("synth");
    std::fs::create_dir(&synth).unwrap();
    let o = padbench(&["compose", "--assignment", p(&assignment), "--mode", "synthetic", "--synth-dir", p(&synth), "--out", p(&listing)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], Value::from("missing_synthetic_file"));
    for f in a.frames.iter().filter(|f| f.half == Some(Half::TB) && f.class_label.pai_code() == 0) {
        std::fs::write(synth.join(padbench_core::dataset::synthetic_file_name(&f.frame_path)), b"").unwrap();
    }
    let o = padbench(&["compose", "--json", "--assignment", p(&assignment), "--mode", "synthetic", "--synth-dir", p(&synth), "--out", p(&listing)]);
    let v = stdout_json(&o);
    let tb_bona = a.frames.iter().filter(|f| f.half == Some(Half::TB) && f.class_label.pai_code() == 0).count();
    assert_eq!(v["files"], Value::from(ta + 2 * tb_bona));
}

#[test]
fn preprocess_and_align_write_images_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("frames");
    let records = support::write_capture_dataset(&root, 2, 5);
    let manifest = root.join("manifest.json");
    write_manifest(&records, &manifest).unwrap();

    let pre = dir.path().join("pre");
    let v = stdout_json(&padbench(&["preprocess", "--json", "--manifest", p(&manifest), "--out", p(&pre)]));
    assert_eq!(v["processed"], Value::from(4));
    let img = load_image(&pre.join(&records[0].frame_path)).unwrap();
    assert_eq!((img.width(), img.height(), img.channels()), (448, 728, 3));

    let aligned = dir.path().join("aligned");
    let v = stdout_json(&padbench(&["align", "--json", "--manifest", p(&manifest), "--task", "print", "--out", p(&aligned)]));
    assert_eq!((v["pairs"].as_u64(), v["aligned"].as_u64()), (Some(2), Some(2)));
    let pairs = std::fs::read_to_string(aligned.join("pairs.csv")).unwrap();
    assert!(pairs.starts_with("bona_path,attack_path,inliers,mean_error_px,status\n"));
    assert_eq!(pairs.lines().filter(|l| l.ends_with(",ok")).count(), 2);
    let name = padbench_core::dataset::synthetic_file_name(&records[0].frame_path);
    let bona = load_image(&aligned.join("bonafide").join(&name)).unwrap();
    let attack = load_image(&aligned.join("attack").join(&name)).unwrap();
    assert_eq!((bona.width(), bona.height()), (attack.width(), attack.height()));
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("aligned.config.json")).unwrap()).unwrap();
    assert_eq!(sidecar["config"]["iterations"], Value::from(2000));
    assert_eq!(sidecar["config"]["inlier_threshold"], Value::from(3.0));
}

#[test]
fn alignment_failures_above_the_rate_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("frames");
    let records = support::write_capture_dataset(&root, 2, 6);
    // A featureless attack frame cannot be aligned.
    let flat = ImageBuffer::filled(640, 960, 3, 90).unwrap();
    save_image(&flat, &root.join(&records[1].frame_path)).unwrap();
    let manifest = root.join("manifest.json");
    write_manifest(&records, &manifest).unwrap();
    let out = dir.path().join("aligned");

    let o = padbench(&["align", "--manifest", p(&manifest), "--task", "print", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], Value::from("too_many_failures"));
    let pairs = std::fs::read_to_string(out.join("pairs.csv")).unwrap();
    assert!(pairs.contains("alignment_failed"), "{pairs}");

    let o = padbench(&["align", "--manifest", p(&manifest), "--task", "print", "--max-fail-rate", "0.5", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn det_writes_svg_and_per_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scores = fixture("separable.csv");
    let svg = dir.path().join("det.svg");
    let o = padbench(&["det", "--scores", p(&scores), p(&scores), "--names", "a", "b", "--out", p(&svg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("a (0.00%)"));
    let csv = dir.path().join("det.csv");
    let o = padbench(&["det", "--scores", p(&scores), p(&scores), "--names", "a", "b", "--out", p(&csv)]);
    assert!(o.status.success());
    assert!(dir.path().join("det.a.csv").exists() && dir.path().join("det.b.csv").exists());
    let o = padbench(&["det", "--scores", p(&scores), p(&scores), "--out", p(&csv)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_2_and_a_json_line() {
    let o = padbench(&["eval", "--scores", "/nonexistent/scores.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], Value::from("file_not_found"));
    assert!(e["message"].as_str().unwrap().contains("/nonexistent/scores.csv"));

    let o = padbench(&["split", "--task", "paint"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], Value::from("usage"));

    let o = padbench::<&str>(&[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_documents_every_flag_and_default() {
    let expectations: [(&str, &[&str]); 7] = [
        ("preprocess", &["--manifest", "--root", "--out", "--mask-margin", "[default: 16]", "--jobs", "--max-fail-rate", "--json"]),
        ("align", &["--manifest", "--task", "--seed", "[default: 0]", "--assignment", "--out", "--fast-threshold", "[default: 2000]", "--jobs"]),
        ("split", &["--manifest", "--rules", "--task", "--seed", "--out", "print, screen"]),
        ("compose", &["--assignment", "--mode", "real-half", "real-full", "synthetic", "--synth-dir", "--out"]),
        ("eval", &["--scores", "--score-polarity", "[default: attack-high]", "--out"]),
        ("det", &["--scores", "--names", "--score-polarity", "--out", "--format"]),
        ("fid", &["--a", "--b", "--out"]),
    ];
    for (command, flags) in expectations {
        let o = padbench(&[command, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = String::from_utf8(o.stdout).unwrap();
        for flag in flags {
            assert!(text.contains(flag), "{command} --help lacks {flag}:\n{text}");
        }
    }
}
