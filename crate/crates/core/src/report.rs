//! Per-backend evaluation reports and cross-backend comparison tables.
//!
//! The on-disk report carries every value rounded to four decimals, and the
//! markdown/CSV renderers draw from that rounded form, so re-rendering a
//! written report reproduces it byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eec::SubsetName;
use crate::metrics::{compute_tgbi, subset_score, MetricsError, SubsetScore, RECOMPUTE_TOLERANCE};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("report file {path} invalid: {detail}")]
    Format { path: PathBuf, detail: String },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("coverage {0} is outside [0, 1]")]
    CoverageOutOfRange(f64),
}

/// One backend's full evaluation: seven subset scores, their mean, and the
/// fraction of sentences that were translated at all.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub backend_id: String,
    pub subset_scores: Vec<SubsetScore>,
    pub tgbi: f64,
    pub coverage: f64,
}

impl EvaluationReport {
    /// Assembles and cross-checks a report: all seven subsets exactly once,
    /// every stored score matching its recomputation, and the mean matching
    /// the stored scores.
    pub fn new(
        backend_id: impl Into<String>,
        subset_scores: Vec<SubsetScore>,
        coverage: f64,
    ) -> Result<Self, ReportError> {
        if !(0.0..=1.0).contains(&coverage) {
            return Err(ReportError::CoverageOutOfRange(coverage));
        }
        for entry in &subset_scores {
            let recomputed = subset_score(&entry.portions)?;
            if (recomputed - entry.score).abs() > RECOMPUTE_TOLERANCE {
                return Err(MetricsError::InvariantViolation {
                    detail: format!(
                        "subset {} stores score {} but recomputes to {recomputed}",
                        entry.name, entry.score
                    ),
                }
                .into());
            }
        }
        let tgbi = compute_tgbi(&subset_scores)?;
        Ok(EvaluationReport {
            backend_id: backend_id.into(),
            subset_scores,
            tgbi,
            coverage,
        })
    }

    /// The 4-decimal on-disk form.
    pub fn to_file(&self) -> ReportFile {
        ReportFile {
            backend_id: self.backend_id.clone(),
            subsets: self
                .subset_scores
                .iter()
                .map(|entry| SubsetRow {
                    name: entry.name,
                    n: entry.portions.n(),
                    p_w: round4(entry.portions.p_w()),
                    p_m: round4(entry.portions.p_m()),
                    p_n: round4(entry.portions.p_n()),
                    score: round4(entry.score),
                })
                .collect(),
            tgbi: round4(self.tgbi),
            coverage: round4(self.coverage),
        }
    }
}

/// One subset line of the on-disk report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetRow {
    pub name: SubsetName,
    pub n: u64,
    pub p_w: f64,
    pub p_m: f64,
    pub p_n: f64,
    pub score: f64,
}

/// On-disk report: every value rounded to four decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub backend_id: String,
    pub subsets: Vec<SubsetRow>,
    pub tgbi: f64,
    pub coverage: f64,
}

impl ReportFile {
    fn row(&self, name: SubsetName) -> Option<&SubsetRow> {
        self.subsets.iter().find(|row| row.name == name)
    }
}

fn round4(value: f64) -> f64 {
    (value * 10000.0).round() / 10000.0
}

/// Writes a report as pretty JSON with a trailing newline.
pub fn write_report_json(path: &Path, report: &ReportFile) -> Result<(), ReportError> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report_json(path: &Path) -> Result<ReportFile, ReportError> {
    let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let report: ReportFile = serde_json::from_str(&text).map_err(|e| ReportError::Format {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    for name in SubsetName::ALL {
        if report.row(name).is_none() {
            return Err(ReportError::Format {
                path: path.to_path_buf(),
                detail: format!("subset {name} missing"),
            });
        }
    }
    Ok(report)
}

fn capitalized(name: SubsetName) -> String {
    let s = name.as_str();
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

fn format_cell(row: &SubsetRow, bold: bool) -> String {
    let cell = format!("{:.4} ({:.4}, {:.4})", row.score, row.p_w, row.p_n);
    if bold {
        format!("**{cell}**")
    } else {
        cell
    }
}

/// Renders the comparison table: one column per backend, one row per subset
/// plus the average. Cells show `score (p_w, p_n)`; each backend's best
/// subset score is bold (all of them on a tie), as is the average row.
/// Subset sizes appear in the row label when all backends agree on them.
pub fn comparison_markdown(reports: &[ReportFile]) -> String {
    let mut out = String::new();
    out.push_str("| Subset |");
    for report in reports {
        out.push_str(&format!(" {} |", report.backend_id));
    }
    out.push('\n');
    out.push_str("| --- |");
    for _ in reports {
        out.push_str(" ---: |");
    }
    out.push('\n');

    let best: Vec<f64> = reports
        .iter()
        .map(|report| {
            report
                .subsets
                .iter()
                .map(|row| row.score)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();

    for name in SubsetName::ALL {
        let sizes: Vec<u64> = reports
            .iter()
            .filter_map(|r| r.row(name).map(|row| row.n))
            .collect();
        let shared_size = match sizes.as_slice() {
            [first, rest @ ..] if rest.iter().all(|n| n == first) => Some(*first),
            _ => None,
        };
        let letter = name.letter();
        match shared_size {
            Some(n) => out.push_str(&format!("| ({letter}) {} [{n}] |", capitalized(name))),
            None => out.push_str(&format!("| ({letter}) {} |", capitalized(name))),
        }
        for (report, best_score) in reports.iter().zip(&best) {
            match report.row(name) {
                Some(row) => {
                    let bold = row.score == *best_score;
                    out.push_str(&format!(" {} |", format_cell(row, bold)));
                }
                None => out.push_str(" |"),
            }
        }
        out.push('\n');
    }

    out.push_str("| **Average** |");
    for report in reports {
        out.push_str(&format!(" **{:.4}** |", report.tgbi));
    }
    out.push('\n');
    out
}

/// Renders the comparison as CSV with one row per (backend, subset) pair and
/// one average row per backend.
pub fn comparison_csv(reports: &[ReportFile]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "backend_id",
            "subset",
            "letter",
            "n",
            "p_w",
            "p_m",
            "p_n",
            "score",
        ])
        .expect("csv header");
    for report in reports {
        for name in SubsetName::ALL {
            if let Some(row) = report.row(name) {
                writer
                    .write_record([
                        report.backend_id.as_str(),
                        name.as_str(),
                        &name.letter().to_string(),
                        &row.n.to_string(),
                        &format!("{:.4}", row.p_w),
                        &format!("{:.4}", row.p_m),
                        &format!("{:.4}", row.p_n),
                        &format!("{:.4}", row.score),
                    ])
                    .expect("csv row");
            }
        }
        writer
            .write_record([
                report.backend_id.as_str(),
                "average",
                "",
                "",
                "",
                "",
                "",
                &format!("{:.4}", report.tgbi),
            ])
            .expect("csv average row");
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv is utf-8")
}
