//! The `padbench` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use padbench_core::dataset::{
    build_splits, compose_training_manifest, partition_halves, synthetic_file_name, validate_assignment, CompositionMode,
    FrameRecord, Half, Split, Task,
};
use padbench_core::fid::frechet_distance_between;
use padbench_core::geometry::RansacParams;
use padbench_core::metrics::{bpcer_at_ap, compute_det, compute_eer, DetCurve, DetPoint, ScorePolarity};
use padbench_core::pipeline::{align_attack_to_bonafide, pair_presentations, preprocess_presentation, AlignParams, PipelineError, PreprocessConfig};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::det_export::{write_det_csv, write_det_svg, NamedCurve};
use crate::embeddings::read_embeddings;
use crate::error::{Error, Result};
use crate::formats::{
    assignment_to_json, counts_json, json_f64, list_file_names, read_assignment, read_manifest, to_json_string,
    validation_json, write_json, write_listing, write_pairs, PairRow,
};
use crate::image_io::{load_image, save_image};
use crate::rules::read_rules;
use crate::scores::read_scores;

#[derive(Debug, Parser)]
#[command(name = "padbench", version, about = "ID-card presentation attack detection benchmark toolkit")]
pub struct Cli {
    /// Print machine-readable JSON instead of aligned tables.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rectify, mask and centre-crop every in-frame manifest record.
    Preprocess(PreprocessArgs),
    /// Pair bona fide and attack frames, preprocess both and align the attack.
    Align(AlignArgs),
    /// Build subject-level splits and T_A/T_B halves from split rules.
    Split(SplitArgs),
    /// Write the training listing of a composition mode.
    Compose(ComposeArgs),
    /// EER, BPCER10/20/100 and per-PAI APCER of a score file.
    Eval(EvalArgs),
    /// DET curves of one or more score files as CSV or SVG.
    Det(DetArgs),
    /// Frechet distance between two PADEMB1 embedding files.
    Fid(FidArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskArg {
    Print,
    Screen,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Print => Task::Print,
            TaskArg::Screen => Task::Screen,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    RealHalf,
    RealFull,
    Synthetic,
}

impl From<ModeArg> for CompositionMode {
    fn from(m: ModeArg) -> CompositionMode {
        match m {
            ModeArg::RealHalf => CompositionMode::RealHalf,
            ModeArg::RealFull => CompositionMode::RealFull,
            ModeArg::Synthetic => CompositionMode::Synthetic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PolarityArg {
    /// Higher scores mean "attack".
    #[default]
    AttackHigh,
    /// Higher scores mean "bona fide".
    BonaFideHigh,
}

impl From<PolarityArg> for ScorePolarity {
    fn from(p: PolarityArg) -> ScorePolarity {
        match p {
            PolarityArg::AttackHigh => ScorePolarity::AttackHigh,
            PolarityArg::BonaFideHigh => ScorePolarity::BonaFideHigh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetFormat {
    Csv,
    Svg,
}

#[derive(Debug, Args, Serialize)]
pub struct GeometryArgs {
    /// Width of the rectified document.
    #[arg(long, default_value_t = 464)]
    pub rect_width: u32,
    /// Height of the rectified document.
    #[arg(long, default_value_t = 744)]
    pub rect_height: u32,
    /// Border zeroed on the rectified document, in pixels.
    #[arg(long, default_value_t = 16)]
    pub mask_margin: u32,
    /// Width of the centre crop.
    #[arg(long, default_value_t = 448)]
    pub crop_width: u32,
    /// Height of the centre crop.
    #[arg(long, default_value_t = 728)]
    pub crop_height: u32,
}

impl GeometryArgs {
    fn config(&self) -> PreprocessConfig {
        PreprocessConfig {
            rect_width: self.rect_width,
            rect_height: self.rect_height,
            mask_margin: self.mask_margin,
            crop_width: self.crop_width,
            crop_height: self.crop_height,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct PreprocessArgs {
    /// Manifest JSON (array of frame records).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory frame paths are relative to [default: the manifest's directory].
    #[arg(long)]
    pub root: Option<PathBuf>,
    /// Output directory; images mirror the frame paths with a .png extension.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Worker threads [default: logical CPU count].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Largest tolerated fraction of failed frames before exiting with 3.
    #[arg(long, default_value_t = 0.0)]
    pub max_fail_rate: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct AlignArgs {
    /// Manifest JSON (array of frame records).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory frame paths are relative to [default: the manifest's directory].
    #[arg(long)]
    pub root: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Seed of the pairing draw and of RANSAC.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Split assignment; when given only T_A train frames are paired.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    /// Output directory for bonafide/, attack/ and pairs.csv.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// FAST intensity threshold.
    #[arg(long, default_value_t = 20)]
    pub fast_threshold: u8,
    /// Keypoints kept per image.
    #[arg(long, default_value_t = 1000)]
    pub max_keypoints: usize,
    /// Largest Hamming distance of a match.
    #[arg(long, default_value_t = 64)]
    pub max_distance: u32,
    /// RANSAC iterations.
    #[arg(long, default_value_t = 2000)]
    pub iterations: u32,
    /// RANSAC inlier threshold on the symmetric transfer error, in pixels.
    #[arg(long, default_value_t = 3.0)]
    pub inlier_threshold: f64,
    /// Worker threads [default: logical CPU count].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Largest tolerated fraction of failed pairs before exiting with 3.
    #[arg(long, default_value_t = 0.1)]
    pub max_fail_rate: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    /// Manifest JSON (array of frame records).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Split rules JSON.
    #[arg(long)]
    pub rules: PathBuf,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Seed of the T_A/T_B shuffle.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Assignment JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ComposeArgs {
    /// Assignment JSON written by `split`.
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Generator output directory (synthetic mode).
    #[arg(long)]
    pub synth_dir: Option<PathBuf>,
    /// Listing CSV to write (path,class_label,origin).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Score CSV (presentation_id,label,score).
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long, value_enum, default_value_t = PolarityArg::AttackHigh)]
    pub score_polarity: PolarityArg,
    /// Metrics JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DetArgs {
    /// Score CSV files, one curve each.
    #[arg(long, required = true, num_args = 1..)]
    pub scores: Vec<PathBuf>,
    /// Legend names, one per score file [default: file stems].
    #[arg(long, num_args = 1..)]
    pub names: Vec<String>,
    #[arg(long, value_enum, default_value_t = PolarityArg::AttackHigh)]
    pub score_polarity: PolarityArg,
    /// Output file; with several score files and CSV output, one file per
    /// curve named <stem>.<name>.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Output format [default: from the --out extension, else svg].
    #[arg(long, value_enum)]
    pub format: Option<DetFormat>,
}

#[derive(Debug, Args, Serialize)]
pub struct FidArgs {
    /// First PADEMB1 file.
    #[arg(long)]
    pub a: PathBuf,
    /// Second PADEMB1 file.
    #[arg(long)]
    pub b: PathBuf,
    /// JSON result to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv`, runs the subcommand and returns the exit code. Errors go
/// to standard error as one JSON object per line.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            report_error("usage", &e.to_string());
            return 2;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            e.exit_code()
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("PADBENCH_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

fn report_error(kind: &str, message: &str) {
    let line = json!({ "error": kind, "message": message.trim_end() });
    eprintln!("{line}");
}

/// Runs a parsed command, writing human or JSON output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let (name, config, sidecar_for) = match &cli.command {
        Command::Preprocess(a) => ("preprocess", serde_json::to_value(a), Some(&a.out)),
        Command::Align(a) => ("align", serde_json::to_value(a), Some(&a.out)),
        Command::Split(a) => ("split", serde_json::to_value(a), a.out.as_ref()),
        Command::Compose(a) => ("compose", serde_json::to_value(a), Some(&a.out)),
        Command::Eval(a) => ("eval", serde_json::to_value(a), a.out.as_ref()),
        Command::Det(a) => ("det", serde_json::to_value(a), Some(&a.out)),
        Command::Fid(a) => ("fid", serde_json::to_value(a), a.out.as_ref()),
    };
    let config = config.expect("arguments serialize");
    let value = match &cli.command {
        Command::Preprocess(a) => cmd_preprocess(a)?,
        Command::Align(a) => cmd_align(a)?,
        Command::Split(a) => cmd_split(a)?,
        Command::Compose(a) => cmd_compose(a)?,
        Command::Eval(a) => cmd_eval(a)?,
        Command::Det(a) => cmd_det(a)?,
        Command::Fid(a) => cmd_fid(a)?,
    };
    if let Some(path) = sidecar_for {
        let sidecar = json!({
            "command": name,
            "config": config,
            "json": cli.json,
            "version": env!("CARGO_PKG_VERSION"),
        });
        write_json(&sidecar, &sidecar_path(path))?;
    }
    let text = if cli.json { to_json_string(&value) } else { render_human(name, &value) };
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))?;
    Ok(())
}

/// `<out>.config.json`, next to the output.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

fn worker_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let threads = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {threads} workers: {e}")))
}

fn frame_root(manifest: &Path, root: &Option<PathBuf>) -> PathBuf {
    root.clone().unwrap_or_else(|| manifest.parent().map(Path::to_path_buf).unwrap_or_default())
}

fn check_fail_rate(failed: usize, total: usize, max_rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&max_rate) {
        return Err(Error::InvalidArgument("--max-fail-rate must be within [0, 1]".into()));
    }
    if total > 0 && failed as f64 / total as f64 > max_rate {
        return Err(Error::TooManyFailures { failed, total, max_rate });
    }
    Ok(())
}

fn preprocess_record(root: &Path, r: &FrameRecord, cfg: &PreprocessConfig) -> Result<padbench_core::ImageBuffer> {
    let frame = load_image(&root.join(&r.frame_path))?;
    Ok(preprocess_presentation(&frame, &r.quad, cfg)?)
}

fn cmd_preprocess(a: &PreprocessArgs) -> Result<Value> {
    let cfg = a.geometry.config();
    cfg.validate()?;
    let records = read_manifest(&a.manifest)?;
    let root = frame_root(&a.manifest, &a.root);
    let todo: Vec<&FrameRecord> = records.iter().filter(|r| r.in_frame).collect();
    let skipped = records.len() - todo.len();
    let pool = worker_pool(a.jobs)?;
    let results: Vec<Result<()>> = pool.install(|| {
        todo.par_iter()
            .map(|r| {
                let img = preprocess_record(&root, r, &cfg)?;
                save_image(&img, &a.out.join(&r.frame_path).with_extension("png"))
            })
            .collect()
    });
    let mut failed = Vec::new();
    for (r, res) in todo.iter().zip(&results) {
        if let Err(e) = res {
            warn!("{}: {e}", r.frame_path);
            failed.push(json!({ "frame_path": r.frame_path, "error": e.kind(), "message": e.to_string() }));
        }
    }
    info!("preprocessed {} frames, {} failed, {skipped} out of frame", todo.len() - failed.len(), failed.len());
    check_fail_rate(failed.len(), todo.len(), a.max_fail_rate)?;
    Ok(json!({
        "processed": todo.len() - failed.len(),
        "failed": failed.len(),
        "skipped_out_of_frame": skipped,
        "failures": failed,
    }))
}

fn cmd_align(a: &AlignArgs) -> Result<Value> {
    let cfg = a.geometry.config();
    cfg.validate()?;
    let task: Task = a.task.into();
    let mut records = read_manifest(&a.manifest)?;
    if let Some(path) = &a.assignment {
        let assignment = read_assignment(path)?;
        if assignment.task != task {
            return Err(Error::InvalidArgument(format!("assignment is for task {}, not {task}", assignment.task)));
        }
        let keep: std::collections::BTreeSet<&str> = assignment
            .frames
            .iter()
            .filter(|f| f.split == Split::Train && f.half == Some(Half::TA))
            .map(|f| f.frame_path.as_str())
            .collect();
        records.retain(|r| keep.contains(r.frame_path.as_str()));
    }
    let pairing = pair_presentations(&records, task, a.seed)?;
    if pairing.skipped_subjects > 0 {
        warn!("{} subjects have no {} frames and were skipped", pairing.skipped_subjects, task.attack_class());
    }
    let params = AlignParams {
        fast_threshold: a.fast_threshold,
        max_keypoints: a.max_keypoints,
        max_distance: a.max_distance,
        ransac: RansacParams { iterations: a.iterations, inlier_threshold: a.inlier_threshold, seed: a.seed },
        ..AlignParams::default()
    };
    let root = frame_root(&a.manifest, &a.root);
    let pool = worker_pool(a.jobs)?;
    let rows: Vec<PairRow> = pool.install(|| {
        pairing
            .pairs
            .par_iter()
            .map(|p| {
                let (bona, attack) = (&records[p.bona], &records[p.attack]);
                let mut row = PairRow {
                    bona_path: bona.frame_path.clone(),
                    attack_path: attack.frame_path.clone(),
                    inliers: 0,
                    mean_error_px: f64::NAN,
                    status: "ok".into(),
                };
                let outcome = (|| -> Result<()> {
                    let b = preprocess_record(&root, bona, &cfg)?;
                    let t = preprocess_record(&root, attack, &cfg)?;
                    let (aligned, report) = align_attack_to_bonafide(&b, &t, &params)?;
                    row.inliers = report.inliers;
                    row.mean_error_px = report.mean_error_px;
                    let name = synthetic_file_name(&bona.frame_path);
                    save_image(&b, &a.out.join("bonafide").join(&name))?;
                    save_image(&aligned, &a.out.join("attack").join(&name))
                })();
                if let Err(e) = outcome {
                    warn!("{} / {}: {e}", bona.frame_path, attack.frame_path);
                    if let Error::Pipeline(PipelineError::AlignmentFailed { inliers, mean_error_px, .. }) = e {
                        row.inliers = inliers;
                        row.mean_error_px = mean_error_px;
                    }
                    row.status = e.kind().into();
                }
                row
            })
            .collect()
    });
    write_pairs(&rows, &a.out.join("pairs.csv"))?;
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    check_fail_rate(failed, rows.len(), a.max_fail_rate)?;
    Ok(json!({
        "pairs": rows.len(),
        "aligned": rows.len() - failed,
        "failed": failed,
        "skipped_subjects": pairing.skipped_subjects,
    }))
}

fn cmd_split(a: &SplitArgs) -> Result<Value> {
    let records = read_manifest(&a.manifest)?;
    let rules = read_rules(&a.rules)?;
    let assignment = build_splits(&records, a.task.into(), &rules)?;
    let assignment = partition_halves(&assignment, a.seed)?;
    let report = validate_assignment(&assignment);
    let summary = json!({
        "task": assignment.task.as_str(),
        "frames": assignment.frames.len(),
        "counts": counts_json(&assignment),
        "validation": validation_json(&report),
    });
    if let Some(out) = &a.out {
        let mut doc = assignment_to_json(&assignment);
        doc["seed"] = json!(a.seed);
        doc["counts"] = summary["counts"].clone();
        doc["validation"] = summary["validation"].clone();
        write_json(&doc, out)?;
    }
    Ok(summary)
}

fn cmd_compose(a: &ComposeArgs) -> Result<Value> {
    let assignment = read_assignment(&a.assignment)?;
    let mode: CompositionMode = a.mode.into();
    let (dir, files) = match (&a.synth_dir, mode) {
        (Some(dir), CompositionMode::Synthetic) => (dir.to_string_lossy().into_owned(), list_file_names(dir)?),
        (None, CompositionMode::Synthetic) => {
            return Err(Error::InvalidArgument("--synth-dir is required in synthetic mode".into()))
        }
        _ => (String::new(), Default::default()),
    };
    let listing = compose_training_manifest(&assignment, mode, &dir, &files)?;
    write_listing(&listing, &a.out)?;
    let mut by_origin = Map::new();
    for e in &listing {
        let key = format!("{}/{}", e.origin.as_str(), e.class_label.as_str());
        let n = by_origin.get(&key).and_then(Value::as_u64).unwrap_or(0);
        by_origin.insert(key, json!(n + 1));
    }
    Ok(json!({ "mode": mode.as_str(), "files": listing.len(), "by_origin": by_origin }))
}

fn point_json(curve: &DetCurve, p: &DetPoint) -> Value {
    let apcer: Map<String, Value> = curve.pais.iter().zip(&p.apcer).map(|(j, a)| (j.to_string(), json_f64(*a))).collect();
    json!({
        "threshold": json_f64(p.threshold),
        "apcer_max": json_f64(p.apcer_max),
        "bpcer": json_f64(p.bpcer),
        "apcer": apcer,
    })
}

/// Metrics document of one curve. The per-PAI table lists, for each
/// operating point, the DET point it is anchored at: the first point with
/// APCER ≥ BPCER for the EER and the last point with APCER ≤ 100/AP for
/// BPCER_AP.
pub fn metrics_json(curve: &DetCurve) -> Value {
    let eer = compute_eer(curve);
    let mut result = Map::new();
    result.insert("eer".into(), json_f64(eer));
    let mut saturated = Map::new();
    let mut table = Vec::new();
    if let Some(k) = curve.points.iter().position(|p| p.apcer_max >= p.bpcer) {
        let mut row = point_json(curve, &curve.points[k]);
        row["operating_point"] = json!("eer");
        table.push(row);
    }
    for ap in [10u32, 20, 100] {
        let op = bpcer_at_ap(curve, ap).expect("non-zero AP");
        result.insert(format!("bpcer{ap}"), json_f64(op.bpcer));
        saturated.insert(format!("bpcer{ap}"), json!(op.saturated));
        let target = 100.0 / ap as f64;
        if let Some(k) = curve.points.iter().rposition(|p| p.apcer_max <= target) {
            let mut row = point_json(curve, &curve.points[k]);
            row["operating_point"] = json!(format!("bpcer{ap}"));
            table.push(row);
        }
    }
    result.insert("saturated".into(), Value::Object(saturated));
    result.insert("apcer_table".into(), Value::Array(table));
    result.insert("pais".into(), json!(curve.pais));
    Value::Object(result)
}

fn cmd_eval(a: &EvalArgs) -> Result<Value> {
    let records = read_scores(&a.scores, a.score_polarity.into())?;
    let curve = compute_det(&records)?;
    let mut value = metrics_json(&curve);
    let mut counts = Map::new();
    for r in &records {
        let key = r.label.to_string();
        let n = counts.get(&key).and_then(Value::as_u64).unwrap_or(0);
        counts.insert(key, json!(n + 1));
    }
    value["counts"] = Value::Object(counts);
    value["records"] = json!(records.len());
    if let Some(out) = &a.out {
        write_json(&value, out)?;
    }
    Ok(value)
}

fn cmd_det(a: &DetArgs) -> Result<Value> {
    if !a.names.is_empty() && a.names.len() != a.scores.len() {
        return Err(Error::InvalidArgument(format!("{} names given for {} score files", a.names.len(), a.scores.len())));
    }
    let format = a.format.unwrap_or(match a.out.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => DetFormat::Csv,
        _ => DetFormat::Svg,
    });
    let mut curves = Vec::new();
    for (i, path) in a.scores.iter().enumerate() {
        let name = a.names.get(i).cloned().unwrap_or_else(|| {
            path.file_stem().map_or_else(|| format!("curve{i}"), |s| s.to_string_lossy().into_owned())
        });
        let curve = compute_det(&read_scores(path, a.score_polarity.into())?)?;
        if curves.iter().any(|(n, _)| *n == name) {
            return Err(Error::InvalidArgument(format!("duplicate curve name {name:?}; pass --names")));
        }
        curves.push((name, curve));
    }
    let mut written = Vec::new();
    match format {
        DetFormat::Svg => {
            let named: Vec<NamedCurve<'_>> = curves.iter().map(|(n, c)| NamedCurve { name: n, curve: c }).collect();
            write_det_svg(&named, &a.out)?;
            written.push(a.out.clone());
        }
        DetFormat::Csv if curves.len() == 1 => {
            write_det_csv(&curves[0].1, &a.out)?;
            written.push(a.out.clone());
        }
        DetFormat::Csv => {
            let stem = a.out.with_extension("");
            for (name, curve) in &curves {
                let mut p = stem.as_os_str().to_owned();
                p.push(format!(".{name}.csv"));
                let p = PathBuf::from(p);
                write_det_csv(curve, &p)?;
                written.push(p);
            }
        }
    }
    let entries: Vec<Value> = curves
        .iter()
        .map(|(n, c)| json!({ "name": n, "eer": json_f64(compute_eer(c)), "points": c.points.len() }))
        .collect();
    Ok(json!({ "curves": entries, "written": written }))
}

fn cmd_fid(a: &FidArgs) -> Result<Value> {
    let x = read_embeddings(&a.a)?;
    let y = read_embeddings(&a.b)?;
    let fid = frechet_distance_between(&x, &y)?;
    let value = json!({ "fid": fid, "count_a": x.count(), "count_b": y.count(), "dim": x.dim() });
    if let Some(out) = &a.out {
        write_json(&value, out)?;
    }
    Ok(value)
}

fn fmt_num(v: &Value) -> String {
    match v.as_f64() {
        Some(f) if v.is_f64() => format!("{f:.4}"),
        _ => match v {
            Value::String(s) => s.clone(),
            Value::Null => "-".into(),
            other => other.to_string(),
        },
    }
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn render_human(command: &str, v: &Value) -> String {
    match command {
        "fid" => format!("{:.6}", v["fid"].as_f64().unwrap_or(f64::NAN)),
        "eval" => {
            let mut rows = vec![vec!["metric".to_string(), "value (%)".to_string(), "saturated".to_string()]];
            rows.push(vec!["EER".into(), fmt_num(&v["eer"]), String::new()]);
            for ap in ["bpcer10", "bpcer20", "bpcer100"] {
                rows.push(vec![ap.to_uppercase(), fmt_num(&v[ap]), v["saturated"][ap].to_string()]);
            }
            let mut out = table(&rows);
            let pais: Vec<String> = v["pais"].as_array().map_or(vec![], |a| a.iter().map(|p| p.to_string()).collect());
            let mut rows = vec![["point", "threshold", "apcer_max", "bpcer"].map(String::from).to_vec()];
            rows[0].extend(pais.iter().map(|j| format!("apcer_{j}")));
            for row in v["apcer_table"].as_array().into_iter().flatten() {
                let mut r = vec![fmt_num(&row["operating_point"]), fmt_num(&row["threshold"]), fmt_num(&row["apcer_max"]), fmt_num(&row["bpcer"])];
                r.extend(pais.iter().map(|j| fmt_num(&row["apcer"][j])));
                rows.push(r);
            }
            out.push_str("\n\n");
            out.push_str(&table(&rows));
            out
        }
        "split" => {
            let mut rows = vec![vec!["split".to_string()]];
            let counts = &v["counts"];
            let classes: Vec<String> =
                counts["splits"]["train"].as_object().map_or(vec![], |m| m.keys().cloned().collect());
            rows[0].extend(classes.iter().cloned());
            for split in ["train", "validation", "test", "T_A", "T_B"] {
                let src = if split.starts_with("T_") { &counts["halves"][split] } else { &counts["splits"][split] };
                let mut r = vec![split.to_string()];
                r.extend(classes.iter().map(|c| fmt_num(&src[c])));
                rows.push(r);
            }
            let mut out = table(&rows);
            let violations = v["validation"]["violations"].as_array().cloned().unwrap_or_default();
            if violations.is_empty() {
                out.push_str("\n\nno violations");
            } else {
                out.push_str(&format!("\n\n{} violations:", violations.len()));
                for item in violations {
                    out.push_str(&format!("\n  {item}"));
                }
            }
            out
        }
        "det" => {
            let mut rows = vec![vec!["curve".to_string(), "EER (%)".to_string(), "points".to_string()]];
            for c in v["curves"].as_array().into_iter().flatten() {
                rows.push(vec![fmt_num(&c["name"]), fmt_num(&c["eer"]), fmt_num(&c["points"])]);
            }
            table(&rows)
        }
        _ => {
            let rows: Vec<Vec<String>> = v
                .as_object()
                .into_iter()
                .flatten()
                .filter(|(_, val)| !val.is_array() || val.as_array().is_some_and(|a| !a.is_empty()))
                .map(|(k, val)| vec![k.clone(), if val.is_object() || val.is_array() { val.to_string() } else { fmt_num(val) }])
                .collect();
            table(&rows)
        }
    }
}
