//! Score files: CSV with header `presentation_id,label,score`.

use std::path::Path;

use padbench_core::metrics::{validate_scores, ScorePolarity, ScoreRecord};

use crate::error::{Error, Result};
use crate::formats::csv_error;
use crate::fsutil::write_atomic;

pub fn read_scores(path: &Path, polarity: ScorePolarity) -> Result<Vec<ScoreRecord>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, format!("missing column {name:?}; expected presentation_id,label,score")))
    };
    let (id_col, label_col, score_col) = (column("presentation_id")?, column("label")?, column("score")?);
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = i + 2;
        let label: u32 =
            row[label_col].parse().map_err(|_| Error::parse(path, format!("line {line}: label must be a non-negative integer")))?;
        let score: f64 = row[score_col].parse().map_err(|_| Error::parse(path, format!("line {line}: score is not a number")))?;
        out.push(ScoreRecord::new(&row[id_col], label, score));
    }
    validate_scores(&out)?;
    for r in &mut out {
        r.score = polarity.normalize(r.score);
    }
    Ok(out)
}

pub fn write_scores(records: &[ScoreRecord], path: &Path) -> Result<()> {
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["presentation_id", "label", "score"])?;
        for r in records {
            csv.write_record([r.presentation_id.as_str(), &r.label.to_string(), &r.score.to_string()])?;
        }
        csv.flush()
    })
}
