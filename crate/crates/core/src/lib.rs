//! Toolkit for measuring gender bias in Korean-to-English machine
//! translation.
//!
//! The pipeline runs in stages: curated word lists ([`lexicon`]) expand into
//! a template corpus of Korean test sentences ([`eec`]); translation
//! backends turn them into English ([`gateway`], with [`simlab`] providing
//! offline synthetic backends); outputs are labeled by referring gender
//! ([`classifier`]); labels aggregate into per-subset scores and a
//! corpus-level index ([`metrics`]), which [`report`] renders for humans.
//! [`reference`] ships published scores for three commercial systems as a
//! consistency benchmark.

pub mod classifier;
pub mod eec;
pub mod gateway;
pub mod hangul;
pub mod lexicon;
pub mod metrics;
pub mod reference;
pub mod report;
pub mod simlab;

pub use classifier::{classify, Gender, GenderLabel, GenderWordlists};
pub use eec::{ContentClass, EecCorpus, EecSentence, Formality, Politeness, SubsetName};
pub use gateway::{
    BackendDescriptor, BackendKind, BatchOutcome, Gateway, TranslationCache, TranslationRecord,
};
pub use lexicon::{Category, Lexicon, LexiconEntry, Polarity, Slot};
pub use metrics::{
    compute_tgbi, portions_from_labels, score_by_subsets, subset_score, PortionTriple, SubsetScore,
};
pub use report::{EvaluationReport, ReportFile};
pub use simlab::{SyntheticPolicy, TargetPortions};
