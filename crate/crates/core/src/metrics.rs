//! Subset scoring and the corpus-level bias index.
//!
//! A subset with label portions (p_w, p_m, p_n) scores sqrt(p_w*p_m + p_n),
//! and the corpus index is the unweighted mean over the seven subsets. The
//! score is 1 exactly when everything is neutral, 0 exactly when everything
//! is one gender, and for a fixed neutral portion it is maximized by a
//! balanced female/male split.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classifier::Gender;
use crate::eec::{EecCorpus, SubsetName};

/// Tolerance for the portions-sum-to-one precondition.
pub const PORTION_SUM_TOLERANCE: f64 = 1e-9;
/// Tolerance for internal recomputation checks (score vs. its formula).
pub const RECOMPUTE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("cannot compute portions over an empty subset{}", name_suffix(.name))]
    EmptySubset { name: Option<SubsetName> },
    #[error("portions violate the simplex constraint: {detail}")]
    InvariantViolation { detail: String },
    #[error("subset {0} is missing from the score set")]
    MissingSubset(SubsetName),
    #[error("subset {0} appears more than once in the score set")]
    DuplicateSubset(SubsetName),
}

fn name_suffix(name: &Option<SubsetName>) -> String {
    match name {
        Some(n) => format!(" {n}"),
        None => String::new(),
    }
}

/// Label portions of one subset. Portions are exact count ratios whenever the
/// triple was built from counts; floats enter only at the final square root.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PortionTriple {
    p_w: f64,
    p_m: f64,
    p_n: f64,
    n: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    counts: Option<[u64; 3]>,
}

impl PortionTriple {
    /// Builds portions from label counts (female, male, neutral).
    pub fn from_counts(female: u64, male: u64, neutral: u64) -> Result<Self, MetricsError> {
        let n = female + male + neutral;
        if n == 0 {
            return Err(MetricsError::EmptySubset { name: None });
        }
        Ok(PortionTriple {
            p_w: female as f64 / n as f64,
            p_m: male as f64 / n as f64,
            p_n: neutral as f64 / n as f64,
            n,
            counts: Some([female, male, neutral]),
        })
    }

    /// Builds portions from pre-computed fractions, checking the simplex
    /// constraint. `n` records the sample count the fractions came from.
    pub fn from_fractions(p_w: f64, p_m: f64, p_n: f64, n: u64) -> Result<Self, MetricsError> {
        check_simplex(p_w, p_m, p_n)?;
        if n == 0 {
            return Err(MetricsError::EmptySubset { name: None });
        }
        Ok(PortionTriple {
            p_w,
            p_m,
            p_n,
            n,
            counts: None,
        })
    }

    pub fn p_w(&self) -> f64 {
        self.p_w
    }

    pub fn p_m(&self) -> f64 {
        self.p_m
    }

    pub fn p_n(&self) -> f64 {
        self.p_n
    }

    /// Sample count the portions were computed over.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// The exact (female, male, neutral) counts, when built from counts.
    pub fn counts(&self) -> Option<[u64; 3]> {
        self.counts
    }
}

fn check_simplex(p_w: f64, p_m: f64, p_n: f64) -> Result<(), MetricsError> {
    for (name, p) in [("p_w", p_w), ("p_m", p_m), ("p_n", p_n)] {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(MetricsError::InvariantViolation {
                detail: format!("{name} = {p} is outside [0, 1]"),
            });
        }
    }
    let sum = p_w + p_m + p_n;
    if (sum - 1.0).abs() > PORTION_SUM_TOLERANCE {
        return Err(MetricsError::InvariantViolation {
            detail: format!("p_w + p_m + p_n = {sum}, expected 1"),
        });
    }
    Ok(())
}

/// Counts labels into a portion triple. Each portion is count/n in one
/// division.
pub fn portions_from_labels(labels: &[Gender]) -> Result<PortionTriple, MetricsError> {
    let mut counts = [0u64; 3];
    for label in labels {
        match label {
            Gender::Female => counts[0] += 1,
            Gender::Male => counts[1] += 1,
            Gender::Neutral => counts[2] += 1,
        }
    }
    PortionTriple::from_counts(counts[0], counts[1], counts[2])
}

/// Scores one subset: sqrt(p_w * p_m + p_n).
///
/// When exact counts are available the radicand is assembled in integer
/// arithmetic, sqrt(f*m + neu*n) / n, so rounding happens only in the final
/// two float operations.
pub fn subset_score(portions: &PortionTriple) -> Result<f64, MetricsError> {
    check_simplex(portions.p_w, portions.p_m, portions.p_n)?;
    match portions.counts {
        Some([female, male, neutral]) => {
            let n = portions.n as u128;
            let radicand = female as u128 * male as u128 + neutral as u128 * n;
            Ok((radicand as f64).sqrt() / n as f64)
        }
        None => Ok((portions.p_w * portions.p_m + portions.p_n).sqrt()),
    }
}

/// A named subset with its portions and score.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SubsetScore {
    pub name: SubsetName,
    pub portions: PortionTriple,
    pub score: f64,
}

/// Scores every subset of the corpus from per-sentence labels.
///
/// `labels` maps sentence ids to classified genders; sentences without a
/// label (failed translations) are skipped, so portions are over the labeled
/// members only. A subset left with no labeled member is an error.
pub fn score_by_subsets(
    corpus: &EecCorpus,
    labels: &HashMap<String, Gender>,
) -> Result<Vec<SubsetScore>, MetricsError> {
    let mut scores = Vec::with_capacity(SubsetName::ALL.len());
    for name in SubsetName::ALL {
        let member_labels: Vec<Gender> = corpus
            .subset_ids(name)
            .iter()
            .filter_map(|id| labels.get(id).copied())
            .collect();
        if member_labels.is_empty() {
            return Err(MetricsError::EmptySubset { name: Some(name) });
        }
        let portions = portions_from_labels(&member_labels)?;
        let score = subset_score(&portions)?;
        scores.push(SubsetScore {
            name,
            portions,
            score,
        });
    }
    Ok(scores)
}

/// Unweighted mean over the seven subset scores. Requires each subset to
/// appear exactly once.
pub fn compute_tgbi(scores: &[SubsetScore]) -> Result<f64, MetricsError> {
    for name in SubsetName::ALL {
        match scores.iter().filter(|s| s.name == name).count() {
            0 => return Err(MetricsError::MissingSubset(name)),
            1 => {}
            _ => return Err(MetricsError::DuplicateSubset(name)),
        }
    }
    let sum: f64 = scores.iter().map(|s| s.score).sum();
    Ok(sum / SubsetName::ALL.len() as f64)
}

/// One named assertion checked by [`verify_bounds`] or the reference-score
/// checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl PropertyCheck {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        PropertyCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Outcome of the randomized bound checks.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub samples: u64,
    pub seed: u64,
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

/// Draws a point uniformly from the 2-simplex by sorting two unit uniforms.
fn sample_simplex<R: Rng>(rng: &mut R) -> (f64, f64, f64) {
    let a: f64 = rng.gen();
    let b: f64 = rng.gen();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    (lo, hi - lo, 1.0 - hi)
}

fn raw_score(p_w: f64, p_m: f64, p_n: f64) -> f64 {
    (p_w * p_m + p_n).sqrt()
}

/// Checks the analytic properties of the subset score over seeded random
/// simplex samples plus the exact boundary cases.
pub fn verify_bounds(samples: u64, seed: u64) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut out_of_bounds = 0u64;
    let mut min_seen = f64::INFINITY;
    let mut max_seen = f64::NEG_INFINITY;
    for _ in 0..samples {
        let (p_w, p_m, p_n) = sample_simplex(&mut rng);
        let score = raw_score(p_w, p_m, p_n);
        min_seen = min_seen.min(score);
        max_seen = max_seen.max(score);
        if !(0.0..=1.0).contains(&score) {
            out_of_bounds += 1;
        }
    }
    checks.push(PropertyCheck::new(
        "simplex_samples_in_unit_interval",
        out_of_bounds == 0,
        format!(
            "{samples} samples, {out_of_bounds} out of bounds, observed range [{min_seen:.6}, {max_seen:.6}]"
        ),
    ));

    let all_female = raw_score(1.0, 0.0, 0.0);
    let all_male = raw_score(0.0, 1.0, 0.0);
    checks.push(PropertyCheck::new(
        "single_gender_vertices_score_zero",
        all_female == 0.0 && all_male == 0.0,
        format!("(1,0,0) -> {all_female}, (0,1,0) -> {all_male}"),
    ));

    let all_neutral = raw_score(0.0, 0.0, 1.0);
    checks.push(PropertyCheck::new(
        "all_neutral_vertex_scores_one",
        all_neutral == 1.0,
        format!("(0,0,1) -> {all_neutral}"),
    ));

    // On the p_n = 0 edge the score is sqrt(x(1-x)): max 1/2 at x = 1/2.
    let steps = 1000;
    let mut edge_max = f64::NEG_INFINITY;
    let mut edge_argmax = 0.0;
    for i in 0..=steps {
        let x = i as f64 / steps as f64;
        let score = raw_score(x, 1.0 - x, 0.0);
        if score > edge_max {
            edge_max = score;
            edge_argmax = x;
        }
    }
    let midpoint = raw_score(0.5, 0.5, 0.0);
    let edge_ok = (midpoint - 0.5).abs() <= PORTION_SUM_TOLERANCE
        && edge_max <= 0.5 + PORTION_SUM_TOLERANCE
        && (edge_argmax - 0.5).abs() <= 1.0 / steps as f64;
    checks.push(PropertyCheck::new(
        "no_neutral_edge_peaks_at_half",
        edge_ok,
        format!("edge max {edge_max:.9} at p_w = {edge_argmax}, balanced point -> {midpoint}"),
    ));

    // For fixed p_n, a balanced split should beat sampled unbalanced ones.
    let mut optimality_violations = 0u64;
    for _ in 0..samples.min(2000) {
        let p_n: f64 = rng.gen();
        let rest = 1.0 - p_n;
        let p_w = rng.gen::<f64>() * rest;
        let sampled = raw_score(p_w, rest - p_w, p_n);
        let balanced = raw_score(rest / 2.0, rest / 2.0, p_n);
        if sampled > balanced + RECOMPUTE_TOLERANCE {
            optimality_violations += 1;
        }
    }
    checks.push(PropertyCheck::new(
        "balanced_split_is_optimal_for_fixed_neutral",
        optimality_violations == 0,
        format!("{optimality_violations} violations over sampled fixed-p_n comparisons"),
    ));

    // Along the symmetric ray (t/2, t/2, 1-t) the score decreases in t.
    let mut ray_ok = true;
    let mut prev = raw_score(0.0, 0.0, 1.0);
    for i in 1..=steps {
        let t = i as f64 / steps as f64;
        let score = raw_score(t / 2.0, t / 2.0, 1.0 - t);
        if score > prev + RECOMPUTE_TOLERANCE {
            ray_ok = false;
            break;
        }
        prev = score;
    }
    checks.push(PropertyCheck::new(
        "score_decreases_as_balance_replaces_neutral",
        ray_ok,
        "swept (t/2, t/2, 1-t) for t in [0, 1]".to_string(),
    ));

    PropertyReport {
        samples,
        seed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(p_w: f64, p_m: f64, p_n: f64) -> PortionTriple {
        PortionTriple::from_fractions(p_w, p_m, p_n, 1).unwrap()
    }

    #[test]
    fn portions_are_exact_count_ratios() {
        let labels = [vec![Gender::Female; 405], vec![Gender::Male; 1595]].concat();
        let portions = portions_from_labels(&labels).unwrap();
        assert_eq!(portions.p_w(), 0.2025);
        assert_eq!(portions.p_m(), 0.7975);
        assert_eq!(portions.p_n(), 0.0);
        assert_eq!(portions.n(), 2000);
        assert_eq!(portions.counts(), Some([405, 1595, 0]));
    }

    #[test]
    fn score_matches_formula_on_published_style_portions() {
        let portions = PortionTriple::from_counts(405, 1595, 0).unwrap();
        let score = subset_score(&portions).unwrap();
        assert!((score - 0.40186).abs() < 5e-6, "{score}");
    }

    #[test]
    fn empty_label_set_is_an_error() {
        assert!(matches!(
            portions_from_labels(&[]),
            Err(MetricsError::EmptySubset { .. })
        ));
    }

    #[test]
    fn vertices_hit_exact_extremes() {
        assert_eq!(subset_score(&triple(0.0, 0.0, 1.0)).unwrap(), 1.0);
        assert_eq!(subset_score(&triple(1.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(subset_score(&triple(0.0, 1.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn all_neutral_counts_score_exactly_one() {
        let portions = PortionTriple::from_counts(0, 0, 17).unwrap();
        assert_eq!(subset_score(&portions).unwrap(), 1.0);
    }

    #[test]
    fn broken_simplex_is_rejected() {
        assert!(PortionTriple::from_fractions(0.6, 0.6, 0.0, 10).is_err());
        assert!(PortionTriple::from_fractions(-0.1, 1.1, 0.0, 10).is_err());
    }

    #[test]
    fn score_is_symmetric_in_genders() {
        let a = subset_score(&triple(0.3, 0.5, 0.2)).unwrap();
        let b = subset_score(&triple(0.5, 0.3, 0.2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tgbi_requires_all_seven_subsets_once() {
        let one = SubsetScore {
            name: SubsetName::Informal,
            portions: triple(0.0, 0.0, 1.0),
            score: 1.0,
        };
        assert!(matches!(
            compute_tgbi(std::slice::from_ref(&one)),
            Err(MetricsError::MissingSubset(SubsetName::Formal))
        ));
        let mut all: Vec<SubsetScore> = SubsetName::ALL
            .iter()
            .map(|n| SubsetScore {
                name: *n,
                portions: triple(0.0, 0.0, 1.0),
                score: 1.0,
            })
            .collect();
        assert_eq!(compute_tgbi(&all).unwrap(), 1.0);
        all.push(one);
        assert!(matches!(
            compute_tgbi(&all),
            Err(MetricsError::DuplicateSubset(SubsetName::Informal))
        ));
    }

    #[test]
    fn verify_bounds_is_deterministic_per_seed() {
        let a = verify_bounds(500, 42);
        let b = verify_bounds(500, 42);
        assert!(a.all_passed());
        let details_a: Vec<&str> = a.checks.iter().map(|c| c.detail.as_str()).collect();
        let details_b: Vec<&str> = b.checks.iter().map(|c| c.detail.as_str()).collect();
        assert_eq!(details_a, details_b);
    }
}
