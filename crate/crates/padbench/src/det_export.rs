//! DET curve export: CSV tables and SVG plots on normal-deviate axes.

use std::fmt::Write as _;
use std::path::Path;

use padbench_core::metrics::{compute_eer, probit, DetCurve, DetPoint};

use crate::error::{Error, Result};
use crate::formats::csv_error;
use crate::fsutil::write_atomic;

fn fmt_threshold(t: f64) -> String {
    if t == f64::INFINITY {
        "inf".into()
    } else if t == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        t.to_string()
    }
}

/// Header `threshold,apcer_max,bpcer,apcer_<label>...`, one row per point,
/// numbers in shortest round-trip form and `-inf`/`inf` for the sentinels.
pub fn det_to_csv(curve: &DetCurve) -> String {
    let mut out = String::from("threshold,apcer_max,bpcer");
    for j in &curve.pais {
        let _ = write!(out, ",apcer_{j}");
    }
    out.push('\n');
    for p in &curve.points {
        let _ = write!(out, "{},{},{}", fmt_threshold(p.threshold), p.apcer_max, p.bpcer);
        for a in &p.apcer {
            let _ = write!(out, ",{a}");
        }
        out.push('\n');
    }
    out
}

pub fn write_det_csv(curve: &DetCurve, path: &Path) -> Result<()> {
    let text = det_to_csv(curve);
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

pub fn read_det_csv(path: &Path) -> Result<DetCurve> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() < 3 || &headers[0] != "threshold" || &headers[1] != "apcer_max" || &headers[2] != "bpcer" {
        return Err(Error::parse(path, "expected header threshold,apcer_max,bpcer[,apcer_j...]"));
    }
    let pais = headers
        .iter()
        .skip(3)
        .map(|h| h.strip_prefix("apcer_").and_then(|j| j.parse().ok()))
        .collect::<Option<Vec<u32>>>()
        .ok_or_else(|| Error::parse(path, "per-PAI columns must be named apcer_<label>"))?;
    let mut points = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let values = row
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|_| Error::parse(path, format!("line {}: not a number", i + 2)))?;
        points.push(DetPoint { threshold: values[0], apcer_max: values[1], bpcer: values[2], apcer: values[3..].to_vec() });
    }
    Ok(DetCurve { pais, points })
}

/// One curve of a DET plot.
pub struct NamedCurve<'a> {
    pub name: &'a str,
    pub curve: &'a DetCurve,
}

const SIZE: f64 = 640.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 20.0;
const PLOT: f64 = 520.0;
/// Axis range in percent.
const AXIS_MIN: f64 = 0.05;
const AXIS_MAX: f64 = 80.0;
const TICKS: [f64; 10] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 60.0];
/// APCER guides of the BPCER100, BPCER20 and BPCER10 operating points.
const GUIDES: [f64; 3] = [1.0, 5.0, 10.0];
const COLORS: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"];

fn deviate(percent: f64) -> f64 {
    let p = percent.clamp(AXIS_MIN, AXIS_MAX) / 100.0;
    probit(p).expect("clamped into (0, 1)")
}

fn scale(percent: f64) -> f64 {
    let (lo, hi) = (deviate(AXIS_MIN), deviate(AXIS_MAX));
    (deviate(percent) - lo) / (hi - lo) * PLOT
}

fn px(apcer: f64) -> f64 {
    MARGIN_LEFT + scale(apcer)
}

fn py(bpcer: f64) -> f64 {
    MARGIN_TOP + PLOT - scale(bpcer)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v < 1.0 {
        format!("{v}")
    } else {
        format!("{v:.0}")
    }
}

/// APCER (x) against BPCER (y), both on probit scales, with red dotted
/// guides at APCER 10%, 5% and 1% and a legend of `name (EER%)` entries.
pub fn det_to_svg(curves: &[NamedCurve<'_>]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT + PLOT, MARGIN_TOP + PLOT);
    for t in TICKS {
        let (x, y) = (px(t), py(t));
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#dddddd"/>"##);
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/>"##);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y1 + 16.0, tick_label(t));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, y + 4.0, tick_label(t));
    }
    let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#);
    for g in GUIDES {
        let x = px(g);
        let _ = writeln!(
            s,
            r#"<line class="guide" x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="red" stroke-dasharray="2,3"/>"#
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">APCER (%)</text>"#, x0 + PLOT / 2.0, y1 + 36.0);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">BPCER (%)</text>"#,
        x0 - 46.0,
        y0 + PLOT / 2.0,
        x0 - 46.0,
        y0 + PLOT / 2.0
    );
    for (i, nc) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> =
            nc.curve.points.iter().map(|p| format!("{:.2},{:.2}", px(p.apcer_max), py(p.bpcer))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    }
    let (lx, mut ly) = (x1 - 190.0, y0 + 16.0);
    for (i, nc) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let eer = compute_eer(nc.curve);
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#, ly - 4.0, lx + 20.0, ly - 4.0);
        let _ = writeln!(s, r#"<text class="legend" x="{:.2}" y="{ly:.2}">{} ({eer:.2}%)</text>"#, lx + 26.0, escape(nc.name));
        ly += 16.0;
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_det_svg(curves: &[NamedCurve<'_>], path: &Path) -> Result<()> {
    let text = det_to_svg(curves);
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}
