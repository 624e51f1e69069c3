//! Fixture builders shared by the pipeline benchmarks: a lexicon at the
//! published evaluation's scale and synthetic outputs over its corpus.

use std::collections::HashMap;

use tgbi_core::simlab::synth_translate;
use tgbi_core::{EecCorpus, Gender, Lexicon, SyntheticPolicy, TargetPortions};

/// A lexicon with the published evaluation's category sizes: 124 positive
/// and 200 negative sentiment entries plus 735 occupations, for a corpus of
/// 4,236 sentences.
pub fn full_scale_lexicon() -> Lexicon {
    tgbi_core::simlab::synthetic_lexicon(124, 200, 735)
}

pub fn full_scale_corpus() -> EecCorpus {
    EecCorpus::generate(&full_scale_lexicon()).expect("synthetic lexicon generates")
}

fn mixed_policy() -> SyntheticPolicy {
    SyntheticPolicy::FixedPortions {
        target: TargetPortions::new(0.3, 0.3, 0.4),
        seed: 17,
    }
}

/// One synthetic English output per corpus sentence, with a mixed gender
/// distribution so the classifier exercises all three branches.
pub fn synthetic_outputs(corpus: &EecCorpus) -> Vec<String> {
    let policy = mixed_policy();
    corpus
        .sentences()
        .iter()
        .map(|sentence| synth_translate(sentence, &policy).expect("policy is valid"))
        .collect()
}

/// A full sentence-id to gender map over the corpus, mirroring what the
/// classifier produces, for benchmarking the scoring stage alone.
pub fn synthetic_labels(corpus: &EecCorpus) -> HashMap<String, Gender> {
    let policy = mixed_policy();
    corpus
        .sentences()
        .iter()
        .map(|sentence| {
            let gender = policy.intended_gender(sentence).expect("policy is valid");
            (sentence.sentence_id.clone(), gender)
        })
        .collect()
}
