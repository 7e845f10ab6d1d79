//! JSON and CSV formats of manifests, split assignments, training listings
//! and alignment pair reports.

use std::collections::BTreeSet;
use std::path::Path;

use padbench_core::dataset::{
    AssignedFrame, ClassLabel, DocType, FrameRecord, Half, ListingEntry, Origin, SourceDataset, Split,
    SplitAssignment, Task, ValidationReport, Violation,
};
use padbench_core::imaging::Quad;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fsutil::{read_to_string, write_atomic};

#[derive(Debug, Serialize, Deserialize)]
struct FrameRecordJson {
    subject_id: String,
    doc_type: String,
    source_dataset: String,
    class_label: String,
    frame_path: String,
    quad: Vec<f64>,
    in_frame: bool,
}

fn parse_field<T>(value: &str, parse: impl Fn(&str) -> Option<T>, what: &str, index: usize, path: &Path) -> Result<T> {
    parse(value).ok_or_else(|| Error::parse(path, format!("record {index}: unknown {what} {value:?}")))
}

pub fn parse_manifest(text: &str, path: &Path) -> Result<Vec<FrameRecord>> {
    let raw: Vec<FrameRecordJson> = serde_json::from_str(text).map_err(|e| Error::parse(path, e))?;
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            let quad: [f64; 8] = r.quad.as_slice().try_into().map_err(|_| {
                Error::parse(path, format!("record {i}: quad needs 8 numbers, got {}", r.quad.len()))
            })?;
            Ok(FrameRecord {
                doc_type: parse_field(&r.doc_type, DocType::parse, "doc_type", i, path)?,
                source_dataset: parse_field(&r.source_dataset, SourceDataset::parse, "source_dataset", i, path)?,
                class_label: parse_field(&r.class_label, ClassLabel::parse, "class_label", i, path)?,
                subject_id: r.subject_id,
                frame_path: r.frame_path,
                quad: Quad::from_flat(quad),
                in_frame: r.in_frame,
            })
        })
        .collect()
}

pub fn read_manifest(path: &Path) -> Result<Vec<FrameRecord>> {
    parse_manifest(&read_to_string(path)?, path)
}

pub fn manifest_to_json(records: &[FrameRecord]) -> String {
    let raw: Vec<FrameRecordJson> = records
        .iter()
        .map(|r| FrameRecordJson {
            subject_id: r.subject_id.clone(),
            doc_type: r.doc_type.as_str().into(),
            source_dataset: r.source_dataset.as_str().into(),
            class_label: r.class_label.as_str().into(),
            frame_path: r.frame_path.clone(),
            quad: r.quad.to_flat().to_vec(),
            in_frame: r.in_frame,
        })
        .collect();
    serde_json::to_string_pretty(&raw).expect("manifest serializes")
}

pub fn write_manifest(records: &[FrameRecord], path: &Path) -> Result<()> {
    let text = manifest_to_json(records);
    write_atomic(path, |w| writeln!(w, "{text}"))
}

/// Pretty JSON with object keys sorted (serde_json maps are ordered).
pub fn to_json_string(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serializes")
}

pub fn write_json(value: &Value, path: &Path) -> Result<()> {
    let text = to_json_string(value);
    write_atomic(path, |w| writeln!(w, "{text}"))
}

/// JSON number, or `null` for NaN and infinities.
pub fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn counts_json(a: &SplitAssignment) -> Value {
    let mut splits = serde_json::Map::new();
    for split in Split::ALL {
        let mut classes = serde_json::Map::new();
        for class in a.task.classes() {
            classes.insert(class.as_str().into(), json!(a.count(*split, class)));
        }
        splits.insert(split.as_str().into(), Value::Object(classes));
    }
    let mut halves = serde_json::Map::new();
    for half in Half::ALL {
        let mut classes = serde_json::Map::new();
        for class in a.task.classes() {
            classes.insert(class.as_str().into(), json!(a.half_count(*half, class)));
        }
        halves.insert(half.as_str().into(), Value::Object(classes));
    }
    json!({ "splits": splits, "halves": halves })
}

pub fn validation_json(report: &ValidationReport) -> Value {
    let items: Vec<Value> = report
        .violations
        .iter()
        .map(|v| match v {
            Violation::SubjectInMultipleSplits { subject, splits } => json!({
                "kind": "subject_in_multiple_splits",
                "doc_type": subject.doc_type.as_str(),
                "subject_id": subject.subject_id,
                "splits": splits.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            }),
            Violation::TooFewSubjects { split, doc_type, class_label, subjects } => json!({
                "kind": "too_few_subjects",
                "split": split.as_str(),
                "doc_type": doc_type.as_str(),
                "class_label": class_label.as_str(),
                "subjects": subjects,
            }),
            Violation::ClassImbalance { split, ratio, counts } => json!({
                "kind": "class_imbalance",
                "split": split.as_str(),
                "ratio": json_f64(*ratio),
                "counts": counts.iter().map(|(c, n)| (c.as_str().to_string(), json!(n))).collect::<serde_json::Map<_, _>>(),
            }),
            Violation::HalfImbalance { class_label, t_a, t_b } => json!({
                "kind": "half_imbalance",
                "class_label": class_label.as_str(),
                "T_A": t_a,
                "T_B": t_b,
            }),
        })
        .collect();
    json!({ "clean": report.is_clean(), "violations": items })
}

pub fn assignment_to_json(a: &SplitAssignment) -> Value {
    let frames: Vec<Value> = a
        .frames
        .iter()
        .map(|f| {
            json!({
                "frame_path": f.frame_path,
                "subject_id": f.subject_id,
                "doc_type": f.doc_type.as_str(),
                "source_dataset": f.source_dataset.as_str(),
                "class_label": f.class_label.as_str(),
                "split": f.split.as_str(),
                "half": f.half.map(|h| h.as_str()),
            })
        })
        .collect();
    json!({ "task": a.task.as_str(), "frames": frames })
}

#[derive(Debug, Deserialize)]
struct AssignedFrameJson {
    frame_path: String,
    subject_id: String,
    doc_type: String,
    source_dataset: String,
    class_label: String,
    split: String,
    half: Option<String>,
}

#[derive(Debug, Deserialize)]
struct AssignmentJson {
    task: String,
    frames: Vec<AssignedFrameJson>,
}

pub fn parse_assignment(text: &str, path: &Path) -> Result<SplitAssignment> {
    let raw: AssignmentJson = serde_json::from_str(text).map_err(|e| Error::parse(path, e))?;
    let task = Task::parse(&raw.task).ok_or_else(|| Error::parse(path, format!("unknown task {:?}", raw.task)))?;
    let frames = raw
        .frames
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            Ok(AssignedFrame {
                doc_type: parse_field(&f.doc_type, DocType::parse, "doc_type", i, path)?,
                source_dataset: parse_field(&f.source_dataset, SourceDataset::parse, "source_dataset", i, path)?,
                class_label: parse_field(&f.class_label, ClassLabel::parse, "class_label", i, path)?,
                split: parse_field(&f.split, Split::parse, "split", i, path)?,
                half: f.half.as_deref().map(|h| parse_field(h, Half::parse, "half", i, path)).transpose()?,
                frame_path: f.frame_path,
                subject_id: f.subject_id,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SplitAssignment { task, frames })
}

pub fn read_assignment(path: &Path) -> Result<SplitAssignment> {
    parse_assignment(&read_to_string(path)?, path)
}

pub fn write_listing(entries: &[ListingEntry], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["path", "class_label", "origin"])?;
        for e in entries {
            csv.write_record([e.path.as_str(), e.class_label.as_str(), e.origin.as_str()])?;
        }
        csv.flush()
    })
}

pub fn read_listing(path: &Path) -> Result<Vec<ListingEntry>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        if row.len() != 3 {
            return Err(Error::parse(path, format!("row {}: expected 3 fields", i + 1)));
        }
        out.push(ListingEntry {
            path: row[0].to_string(),
            class_label: parse_field(&row[1], ClassLabel::parse, "class_label", i, path)?,
            origin: parse_field(&row[2], Origin::parse, "origin", i, path)?,
        });
    }
    Ok(out)
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::parse(path, e),
    }
}

/// One row of `pairs.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub bona_path: String,
    pub attack_path: String,
    pub inliers: usize,
    pub mean_error_px: f64,
    pub status: String,
}

pub fn write_pairs(rows: &[PairRow], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["bona_path", "attack_path", "inliers", "mean_error_px", "status"])?;
        for r in rows {
            let err = if r.mean_error_px.is_finite() { format!("{:.6}", r.mean_error_px) } else { String::new() };
            csv.write_record([&r.bona_path, &r.attack_path, &r.inliers.to_string(), &err, &r.status])?;
        }
        csv.flush()
    })
}

/// File names directly inside `dir` (no recursion).
pub fn list_file_names(dir: &Path) -> Result<BTreeSet<String>> {
    let mut names = BTreeSet::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.file_type().map_err(|e| Error::io(dir, e))?.is_file() {
            names.insert(entry.file_name().to_string_lossy().into_owned());
        }
    }
    Ok(names)
}
