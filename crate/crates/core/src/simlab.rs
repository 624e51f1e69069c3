//! Synthetic translation backends with controlled gender bias.
//!
//! A policy decides, deterministically per sentence or per lexicon entry,
//! whether the English output refers to a woman, a man, or a person. The
//! outputs use the classifier's own canonical tokens, so routing them back
//! through classification recovers the intended labels exactly. This makes
//! the module double as an end-to-end oracle: subset scores under a known
//! policy can be predicted by counting alone.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classifier::{classify, ClassifyError, Gender, GenderWordlists};
use crate::eec::{ContentClass, EecCorpus, EecSentence};
use crate::lexicon::{Category, Lexicon, LexiconEntry, Polarity, Slot};
use crate::metrics::{
    compute_tgbi, score_by_subsets, MetricsError, SubsetScore, PORTION_SUM_TOLERANCE,
};

#[derive(Debug, Error)]
pub enum SimlabError {
    #[error("synthetic policy invalid: {detail}")]
    InvalidPolicy { detail: String },
    #[error("classifying synthetic output for {sentence_id}: {source}")]
    Classify {
        sentence_id: String,
        source: ClassifyError,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Target label portions for one scope of a policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetPortions {
    pub p_w: f64,
    pub p_m: f64,
    pub p_n: f64,
}

impl TargetPortions {
    pub fn new(p_w: f64, p_m: f64, p_n: f64) -> Self {
        TargetPortions { p_w, p_m, p_n }
    }

    fn check(&self, scope: &str) -> Result<(), SimlabError> {
        for (name, p) in [("p_w", self.p_w), ("p_m", self.p_m), ("p_n", self.p_n)] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(SimlabError::InvalidPolicy {
                    detail: format!("{scope}: {name} = {p} is outside [0, 1]"),
                });
            }
        }
        let sum = self.p_w + self.p_m + self.p_n;
        if (sum - 1.0).abs() > PORTION_SUM_TOLERANCE {
            return Err(SimlabError::InvalidPolicy {
                detail: format!("{scope}: portions sum to {sum}, expected 1"),
            });
        }
        Ok(())
    }
}

/// How a synthetic backend picks the gender of each output.
///
/// `FixedPortions` draws per sentence, so the four variants of one entry can
/// disagree. `PerLexiconDeterministic` draws per lexicon entry, modeling a
/// translation system that always resolves a given word the same way.
/// `PerSubsetPortions` is the per-entry variant with a separate target per
/// content class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntheticPolicy {
    FixedPortions {
        target: TargetPortions,
        #[serde(default)]
        seed: u64,
    },
    PerLexiconDeterministic {
        target: TargetPortions,
        #[serde(default)]
        seed: u64,
    },
    PerSubsetPortions {
        targets: BTreeMap<ContentClass, TargetPortions>,
        #[serde(default)]
        seed: u64,
    },
}

impl SyntheticPolicy {
    pub fn validate(&self) -> Result<(), SimlabError> {
        match self {
            SyntheticPolicy::FixedPortions { target, .. } => target.check("target"),
            SyntheticPolicy::PerLexiconDeterministic { target, .. } => target.check("target"),
            SyntheticPolicy::PerSubsetPortions { targets, .. } => {
                for class in [
                    ContentClass::Negative,
                    ContentClass::Positive,
                    ContentClass::Occupation,
                ] {
                    match targets.get(&class) {
                        Some(target) => target.check(&format!("targets.{class}"))?,
                        None => {
                            return Err(SimlabError::InvalidPolicy {
                                detail: format!("targets has no entry for content class {class}"),
                            })
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// The gender this policy assigns to one sentence.
    pub fn intended_gender(&self, sentence: &EecSentence) -> Result<Gender, SimlabError> {
        self.validate()?;
        let (target, seed, key) = match self {
            SyntheticPolicy::FixedPortions { target, seed } => {
                (*target, *seed, sentence.sentence_id.as_str())
            }
            SyntheticPolicy::PerLexiconDeterministic { target, seed } => {
                (*target, *seed, sentence.entry_ref.as_str())
            }
            SyntheticPolicy::PerSubsetPortions { targets, seed } => (
                targets[&sentence.content_class],
                *seed,
                sentence.entry_ref.as_str(),
            ),
        };
        let u = unit_hash(seed, key);
        Ok(if u < target.p_w {
            Gender::Female
        } else if u < target.p_w + target.p_m {
            Gender::Male
        } else {
            Gender::Neutral
        })
    }
}

/// Maps (seed, key) to a unit-interval value: the first 8 bytes of
/// SHA-256(seed || key), keeping 53 bits so the float is exact.
fn unit_hash(seed: u64, key: &str) -> f64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    let mut eight = [0u8; 8];
    eight.copy_from_slice(&digest[..8]);
    let bits = u64::from_le_bytes(eight) >> 11;
    bits as f64 / (1u64 << 53) as f64
}

/// Produces the English output for one sentence under a policy. The gloss is
/// the lexicon entry id, keeping outputs human-inspectable.
pub fn synth_translate(
    sentence: &EecSentence,
    policy: &SyntheticPolicy,
) -> Result<String, SimlabError> {
    let gloss = &sentence.entry_ref;
    Ok(match policy.intended_gender(sentence)? {
        Gender::Female => format!("She is {gloss}."),
        Gender::Male => format!("He is {gloss}."),
        Gender::Neutral => format!("The person is {gloss}."),
    })
}

/// Subset scores and their mean for one corpus under one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoOutcome {
    pub scores: Vec<SubsetScore>,
    pub tgbi: f64,
}

/// Runs the full loop on a corpus: synthesize outputs, classify them with
/// the default wordlists, score every subset, and average.
pub fn run_subset_demo(
    corpus: &EecCorpus,
    policy: &SyntheticPolicy,
) -> Result<DemoOutcome, SimlabError> {
    policy.validate()?;
    let lists = GenderWordlists::default_lists();
    let mut labels: HashMap<String, Gender> = HashMap::with_capacity(corpus.len());
    for sentence in corpus.sentences() {
        let output = synth_translate(sentence, policy)?;
        let label = classify(&output, &lists).map_err(|source| SimlabError::Classify {
            sentence_id: sentence.sentence_id.clone(),
            source,
        })?;
        labels.insert(sentence.sentence_id.clone(), label.value);
    }
    let scores = score_by_subsets(corpus, &labels)?;
    let tgbi = compute_tgbi(&scores)?;
    Ok(DemoOutcome { scores, tgbi })
}

/// Builds a lexicon of the requested shape with machine-generated ids and
/// unique two-syllable Hangul surfaces, for sizing and throughput tests.
pub fn synthetic_lexicon(n_positive: usize, n_negative: usize, n_occupation: usize) -> Lexicon {
    const FIRST_SYLLABLE: u32 = 0xAC00;
    const SYLLABLE_COUNT: u32 = 11172;
    let mut entries = Vec::with_capacity(n_positive + n_negative + n_occupation);
    let mut counter: u32 = 0;
    let mut push = |prefix: &str,
                    index: usize,
                    category: Category,
                    polarity: Polarity,
                    slot: Slot,
                    entries: &mut Vec<LexiconEntry>| {
        let hi = char::from_u32(FIRST_SYLLABLE + counter / SYLLABLE_COUNT).unwrap();
        let lo = char::from_u32(FIRST_SYLLABLE + counter % SYLLABLE_COUNT).unwrap();
        counter += 1;
        entries.push(LexiconEntry {
            id: format!("{prefix}-{:04}", index + 1),
            surface_hangul: format!("{hi}{lo}"),
            category,
            polarity,
            slot,
            exclusion_flags: Default::default(),
        });
    };
    for i in 0..n_positive {
        push(
            "pos",
            i,
            Category::Sentiment,
            Polarity::Positive,
            Slot::Predicate,
            &mut entries,
        );
    }
    for i in 0..n_negative {
        push(
            "neg",
            i,
            Category::Sentiment,
            Polarity::Negative,
            Slot::Predicate,
            &mut entries,
        );
    }
    for i in 0..n_occupation {
        push(
            "occ",
            i,
            Category::Occupation,
            Polarity::Neutral,
            Slot::NounPhrase,
            &mut entries,
        );
    }
    let outcome = Lexicon::from_entries("synthetic", entries);
    debug_assert!(outcome.rejections.is_empty());
    outcome.lexicon
}
