//! Run-record ingestion and the aligned comparison table: one row per
//! (object count, option flags), one column per formulation, each cell a
//! runtime (converged) or primal/dual gap, with the per-row extremes
//! marked.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFlags {
    #[serde(default)]
    pub cuts: bool,
    #[serde(default)]
    pub heuristics: bool,
    #[serde(default)]
    pub sp: bool,
    #[serde(default)]
    pub branching: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    /// Converged: wall-clock seconds.
    Runtime { runtime_s: f64 },
    /// Hit the limit: percent primal/dual gap.
    Gap { gap_percent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub formulation: String,
    pub n: usize,
    pub flags: RunFlags,
    pub outcome: Outcome,
    #[serde(default)]
    pub nodes: u64,
    #[serde(default)]
    pub solutions: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SummarizeError {
    #[error("bad run records: {0}")]
    Parse(String),
    #[error("record has negative gap {0}")]
    NegativeGap(String),
}

pub fn records_from_json(s: &str) -> Result<Vec<RunRecord>, SummarizeError> {
    let records: Vec<RunRecord> =
        serde_json::from_str(s).map_err(|e| SummarizeError::Parse(e.to_string()))?;
    for r in &records {
        if let Outcome::Gap { gap_percent } = r.outcome {
            if gap_percent < 0.0 {
                return Err(SummarizeError::NegativeGap(format!(
                    "{} n={} gap={gap_percent}",
                    r.formulation, r.n
                )));
            }
        }
    }
    Ok(records)
}

fn flags_label(f: &RunFlags) -> String {
    let mut parts = Vec::new();
    if f.cuts {
        parts.push("cuts");
    }
    if f.heuristics {
        parts.push("heur");
    }
    if f.sp {
        parts.push("sp");
    }
    if f.branching {
        parts.push("branch");
    }
    if parts.is_empty() {
        "plain".to_string()
    } else {
        parts.join("+")
    }
}

fn cell_text(o: &Outcome) -> String {
    match o {
        Outcome::Runtime { runtime_s } => format!("{runtime_s}s"),
        Outcome::Gap { gap_percent } => format!("{gap_percent}%"),
    }
}

/// Ranks outcomes: any convergence beats any gap, then by value.
fn rank(o: &Outcome) -> (u8, f64) {
    match o {
        Outcome::Runtime { runtime_s } => (0, *runtime_s),
        Outcome::Gap { gap_percent } => (1, *gap_percent),
    }
}

const CANONICAL_ORDER: [&str; 6] = ["nu", "su", "ru", "hu", "sbl", "sbm"];

/// Aligned text table over the records, plus the same content as JSON.
/// The smallest cell per row is suffixed `*`, the largest `^`. Empty input
/// yields empty outputs.
pub fn summarize(records: &[RunRecord]) -> (String, String) {
    if records.is_empty() {
        return (String::new(), "[]\n".to_string());
    }
    let mut columns: Vec<String> = CANONICAL_ORDER
        .iter()
        .filter(|f| records.iter().any(|r| r.formulation == **f))
        .map(|s| s.to_string())
        .collect();
    let extras: BTreeSet<String> = records
        .iter()
        .map(|r| r.formulation.clone())
        .filter(|f| !columns.contains(f))
        .collect();
    columns.extend(extras);
    let mut groups: Vec<(usize, String)> = records
        .iter()
        .map(|r| (r.n, flags_label(&r.flags)))
        .collect();
    groups.sort();
    groups.dedup();

    #[derive(Serialize)]
    struct JsonRow {
        n: usize,
        flags: String,
        cells: Vec<Option<String>>,
    }
    let mut grid: Vec<(usize, String, Vec<Option<String>>)> = Vec::new();
    for (n, label) in &groups {
        let row_records: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.n == *n && flags_label(&r.flags) == *label)
            .collect();
        let best = row_records
            .iter()
            .map(|r| rank(&r.outcome))
            .min_by(|a, b| a.partial_cmp(b).unwrap());
        let worst = row_records
            .iter()
            .map(|r| rank(&r.outcome))
            .max_by(|a, b| a.partial_cmp(b).unwrap());
        let cells: Vec<Option<String>> = columns
            .iter()
            .map(|col| {
                row_records
                    .iter()
                    .find(|r| &r.formulation == col)
                    .map(|r| {
                        let mut text = cell_text(&r.outcome);
                        let me = rank(&r.outcome);
                        if row_records.len() > 1 {
                            if Some(me) == best {
                                text.push('*');
                            } else if Some(me) == worst {
                                text.push('^');
                            }
                        }
                        text
                    })
            })
            .collect();
        grid.push((*n, label.clone(), cells));
    }

    let mut header: Vec<String> = vec!["N".into(), "options".into()];
    header.extend(columns.iter().cloned());
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    let mut lines: Vec<Vec<String>> = vec![header];
    for (n, label, cells) in &grid {
        let mut line = vec![n.to_string(), label.clone()];
        line.extend(cells.iter().map(|c| c.clone().unwrap_or_else(|| "-".into())));
        for (i, v) in line.iter().enumerate() {
            widths[i] = widths[i].max(v.len());
        }
        lines.push(line);
    }
    let mut text = String::new();
    for line in &lines {
        let mut rendered = String::new();
        for (i, v) in line.iter().enumerate() {
            let _ = write!(rendered, "{:width$}  ", v, width = widths[i]);
        }
        let _ = writeln!(text, "{}", rendered.trim_end());
    }
    let json_rows: Vec<JsonRow> = grid
        .into_iter()
        .map(|(n, flags, cells)| JsonRow { n, flags, cells })
        .collect();
    let mut json = serde_json::to_string_pretty(&json_rows).expect("table serializes");
    json.push('\n');
    (text, json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(f: &str, n: usize, outcome: Outcome) -> RunRecord {
        RunRecord {
            formulation: f.into(),
            n,
            flags: RunFlags {
                cuts: false,
                heuristics: false,
                sp: false,
                branching: false,
            },
            outcome,
            nodes: 10,
            solutions: 2,
        }
    }

    #[test]
    fn empty_input_empty_table() {
        let (text, json) = summarize(&[]);
        assert!(text.is_empty());
        assert_eq!(json, "[]\n");
    }

    #[test]
    fn runtime_cells_have_seconds_suffix() {
        let (text, _) = summarize(&[rec("su", 10, Outcome::Runtime { runtime_s: 0.79 })]);
        assert!(text.contains("0.79s"));
    }

    #[test]
    fn mixed_cells_and_markers() {
        let records = vec![
            rec("nu", 15, Outcome::Runtime { runtime_s: 501.0 }),
            rec("ru", 15, Outcome::Runtime { runtime_s: 32.9 }),
            rec("sbm", 15, Outcome::Gap { gap_percent: 44.0 }),
        ];
        let (text, json) = summarize(&records);
        assert!(text.contains("32.9s*"));
        assert!(text.contains("44%^"));
        assert!(text.contains("501s"));
        assert!(json.contains("\"44%^\""));
    }

    #[test]
    fn record_json_round_trip_and_gap_check() {
        let json = r#"[{"formulation":"su","n":10,
            "flags":{"cuts":true,"heuristics":false,"sp":true,"branching":true},
            "outcome":{"gap_percent":39.0},"nodes":100,"solutions":5}]"#;
        let records = records_from_json(json).unwrap();
        assert_eq!(records[0].formulation, "su");
        assert!(matches!(records[0].outcome, Outcome::Gap { .. }));
        let bad = r#"[{"formulation":"su","n":10,
            "flags":{},"outcome":{"gap_percent":-1.0}}]"#;
        assert!(records_from_json(bad).is_err());
    }
}
