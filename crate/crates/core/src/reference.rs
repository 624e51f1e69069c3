//! Built-in reference scores from a published 2019 evaluation of three
//! commercial Korean-to-English translation services (ids `gt`, `np`, `kt`).
//!
//! Each cell carries the printed subset score together with the printed
//! female and neutral portions, all rounded to four decimals at the source.
//! The checks here recompute the score from the printed portions and flag
//! cells where rounding cannot explain the gap.

use crate::eec::SubsetName;
use crate::metrics::PropertyCheck;

/// Tolerance for one recomputed cell against its printed score.
pub const CELL_TOLERANCE: f64 = 5e-4;
/// Tolerance for a printed average against the mean of printed scores.
pub const AVERAGE_TOLERANCE: f64 = 1e-3;
/// Half-width of the value interval behind a 4-decimal printed number.
pub const PRINT_ROUNDING: f64 = 5e-5;

/// One published cell: printed score plus printed female/neutral portions.
/// The male portion is implied by the simplex constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCell {
    pub system: &'static str,
    pub subset: SubsetName,
    pub score: f64,
    pub p_w: f64,
    pub p_n: f64,
}

impl ReferenceCell {
    /// Score recomputed from the printed portions.
    pub fn recomputed_score(&self) -> f64 {
        (self.p_w * (1.0 - self.p_w - self.p_n) + self.p_n).sqrt()
    }
}

/// The 21 published subset cells.
pub const REFERENCE_CELLS: [ReferenceCell; 21] = [
    cell("gt", SubsetName::Informal, 0.4018, 0.2025, 0.0000),
    cell("gt", SubsetName::Formal, 0.0574, 0.0000, 0.0033),
    cell("gt", SubsetName::Impolite, 0.3115, 0.1062, 0.0023),
    cell("gt", SubsetName::Polite, 0.2964, 0.0963, 0.0009),
    cell("gt", SubsetName::Negative, 0.3477, 0.1362, 0.0037),
    cell("gt", SubsetName::Positive, 0.4281, 0.2358, 0.0040),
    cell("gt", SubsetName::Occupation, 0.2547, 0.0690, 0.0006),
    cell("np", SubsetName::Informal, 0.3936, 0.1916, 0.0000),
    cell("np", SubsetName::Formal, 0.0485, 0.0014, 0.0009),
    cell("np", SubsetName::Impolite, 0.3582, 0.1506, 0.0004),
    cell("np", SubsetName::Polite, 0.2724, 0.0807, 0.0000),
    cell("np", SubsetName::Negative, 0.1870, 0.0350, 0.0012),
    cell("np", SubsetName::Positive, 0.2691, 0.0786, 0.0000),
    cell("np", SubsetName::Occupation, 0.2209, 0.0496, 0.0017),
    cell("kt", SubsetName::Informal, 0.1750, 0.0316, 0.0000),
    cell("kt", SubsetName::Formal, 0.0217, 0.0000, 0.0004),
    cell("kt", SubsetName::Impolite, 0.1257, 0.0155, 0.0004),
    cell("kt", SubsetName::Polite, 0.1256, 0.0160, 0.0000),
    cell("kt", SubsetName::Negative, 0.1311, 0.0175, 0.0000),
    cell("kt", SubsetName::Positive, 0.1259, 0.0161, 0.0000),
    cell("kt", SubsetName::Occupation, 0.1241, 0.0153, 0.0003),
];

/// The printed per-system averages.
pub const REFERENCE_AVERAGES: [(&str, f64); 3] = [("gt", 0.2992), ("np", 0.2499), ("kt", 0.1184)];

const fn cell(
    system: &'static str,
    subset: SubsetName,
    score: f64,
    p_w: f64,
    p_n: f64,
) -> ReferenceCell {
    ReferenceCell {
        system,
        subset,
        score,
        p_w,
        p_n,
    }
}

fn cell_name(prefix: &str, cell: &ReferenceCell) -> String {
    format!("{prefix}:{}-{}", cell.system, cell.subset)
}

/// Point checks: every printed cell within [`CELL_TOLERANCE`] of its
/// recomputation, every printed average within [`AVERAGE_TOLERANCE`] of the
/// mean of its printed scores.
pub fn consistency_checks() -> Vec<PropertyCheck> {
    let mut checks = Vec::with_capacity(REFERENCE_CELLS.len() + REFERENCE_AVERAGES.len());
    for cell in &REFERENCE_CELLS {
        let recomputed = cell.recomputed_score();
        let diff = (recomputed - cell.score).abs();
        checks.push(PropertyCheck::new(
            cell_name("cell_consistency", cell),
            diff <= CELL_TOLERANCE,
            format!(
                "printed {:.4}, recomputed {recomputed:.6} from (p_w {:.4}, p_n {:.4}), diff {diff:.2e}",
                cell.score, cell.p_w, cell.p_n
            ),
        ));
    }
    for (system, printed_avg) in REFERENCE_AVERAGES {
        let scores: Vec<f64> = REFERENCE_CELLS
            .iter()
            .filter(|c| c.system == system)
            .map(|c| c.score)
            .collect();
        let mean: f64 = scores.iter().sum::<f64>() / scores.len() as f64;
        let diff = (mean - printed_avg).abs();
        checks.push(PropertyCheck::new(
            format!("average_consistency:{system}"),
            diff <= AVERAGE_TOLERANCE,
            format!("printed {printed_avg:.4}, mean of printed scores {mean:.6}, diff {diff:.2e}"),
        ));
    }
    checks
}

/// Interval diagnostic: treats every printed 4-decimal value as its rounding
/// interval (plus or minus [`PRINT_ROUNDING`]) and asks whether any exact
/// triple inside the portion box could print as the given score. A cell that
/// fails the point check but passes here is explained by rounding; a cell
/// that fails here is inconsistent beyond rounding.
pub fn rounding_interval_checks() -> Vec<PropertyCheck> {
    REFERENCE_CELLS
        .iter()
        .map(|cell| {
            let (lo, hi) = radicand_interval(cell.p_w, cell.p_n);
            let score_lo = (cell.score - PRINT_ROUNDING).max(0.0);
            let score_hi = cell.score + PRINT_ROUNDING;
            let (squared_lo, squared_hi) = (score_lo * score_lo, score_hi * score_hi);
            let feasible = squared_hi >= lo && squared_lo <= hi;
            PropertyCheck::new(
                cell_name("cell_interval_feasibility", cell),
                feasible,
                format!(
                    "radicand range [{lo:.6}, {hi:.6}] vs squared score range [{squared_lo:.6}, {squared_hi:.6}]"
                ),
            )
        })
        .collect()
}

/// Range of p_w*(1 - p_w - p_n) + p_n over the print-rounding box around
/// the given portions. For fixed p_n the expression is concave in p_w with
/// the peak at (1 - p_n)/2, and it increases in p_n throughout.
fn radicand_interval(p_w: f64, p_n: f64) -> (f64, f64) {
    let w_lo = (p_w - PRINT_ROUNDING).max(0.0);
    let w_hi = p_w + PRINT_ROUNDING;
    let n_lo = (p_n - PRINT_ROUNDING).max(0.0);
    let n_hi = p_n + PRINT_ROUNDING;
    let value = |w: f64, n: f64| w * (1.0 - w - n) + n;
    let min = value(w_lo, n_lo).min(value(w_hi, n_lo));
    let peak = ((1.0 - n_hi) / 2.0).clamp(w_lo, w_hi);
    let max = value(peak, n_hi);
    (min, max)
}
