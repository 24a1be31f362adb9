//! CSV, JSON and plain-text renderings of an experiment.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::experiment::{ConfigRow, ExperimentReport};

pub const CSV_HEADER: [&str; 12] = [
    "policy",
    "credit",
    "reward",
    "cadence",
    "arms",
    "alpha",
    "success_rate",
    "success_rate_micro",
    "success_rate_macro",
    "bugs_patched",
    "avg_variant",
    "median_variant",
];

const MISSING: &str = "-";

/// CSV fields of one row; settings that do not apply are `-`.
pub fn csv_fields(row: &ConfigRow) -> [String; 12] {
    let s = &row.spec;
    let aos = |v: String| if s.is_uniform() { MISSING.to_string() } else { v };
    [
        s.policy.map_or("uniform".to_string(), |p| p.to_string()),
        aos(s.credit.to_string()),
        aos(s.reward.to_string()),
        aos(s.cadence.to_string()),
        s.arms.to_string(),
        aos(s.alpha.to_string()),
        format!("{:.4}", row.success_rate_micro),
        format!("{:.4}", row.success_rate_micro),
        format!("{:.4}", row.success_rate_macro),
        row.bugs_patched.to_string(),
        row.avg_variant.map_or(MISSING.to_string(), |v| format!("{v:.2}")),
        row.median_variant.map_or(MISSING.to_string(), |v| v.to_string()),
    ]
}

pub fn render_csv(rows: &[ConfigRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(csv_fields(row)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii fields")
}

pub fn render_json(report: &ExperimentReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

fn pct(v: Option<f64>) -> String {
    v.map_or(MISSING.to_string(), |v| format!("{:.1}%", 100.0 * v))
}

/// The summary table, one line per configuration.
pub fn render_table(report: &ExperimentReport) -> String {
    let width = report.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(13);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:width$}  {:>12}  {:>12}  {:>12}  {:>11}  {:>14}  {:>12}  {:>12}",
        "configuration",
        "success rate",
        "(per bug)",
        "bugs patched",
        "avg variant",
        "median variant",
        "mean quality",
        "100% quality",
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:width$}  {:>12}  {:>12}  {:>12}  {:>11}  {:>14}  {:>12}  {:>12}",
            r.label,
            pct(Some(r.success_rate_micro)),
            pct(Some(r.success_rate_macro)),
            r.bugs_patched,
            r.avg_variant.map_or(MISSING.to_string(), |v| format!("{v:.1}")),
            r.median_variant.map_or(MISSING.to_string(), |v| v.to_string()),
            pct(r.quality.mean),
            pct(r.quality.full_share),
        );
    }
    for e in &report.errors {
        let _ = writeln!(out, "error: {}: {}", e.bug, e.message);
    }
    out
}

/// Writes `report.csv`, `report.json`, `report.txt` and one patch file per
/// successful attempt under `patches/<bug>/<config>/`.
pub fn write_outputs(report: &ExperimentReport, out: &Path) -> io::Result<()> {
    fs::create_dir_all(out)?;
    fs::write(out.join("report.csv"), render_csv(&report.rows))?;
    fs::write(out.join("report.json"), render_json(report))?;
    fs::write(out.join("report.txt"), render_table(report))?;
    for a in &report.attempts {
        if let Some(patch) = &a.patch {
            let dir = out.join("patches").join(&a.bug).join(&a.config);
            fs::create_dir_all(&dir)?;
            fs::write(dir.join(format!("attempt-{:02}.patch", a.attempt)), patch)?;
        }
    }
    Ok(())
}
