//! Sentence template rendering and corpus assembly.
//!
//! Every valid lexicon entry expands into four Korean sentences, one per
//! formality/politeness combination. The subject pronoun is gender-neutral in
//! Korean, so any gendered English translation is introduced by the system
//! under test, not by the source sentence.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hangul;
use crate::lexicon::{validate_entry, Category, Lexicon, LexiconEntry, Polarity, Slot, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formality {
    Informal,
    Formal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Politeness {
    Impolite,
    Polite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentClass {
    Negative,
    Positive,
    Occupation,
}

impl fmt::Display for Formality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formality::Informal => "informal",
            Formality::Formal => "formal",
        })
    }
}

impl fmt::Display for Politeness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Politeness::Impolite => "impolite",
            Politeness::Polite => "polite",
        })
    }
}

impl fmt::Display for ContentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContentClass::Negative => "negative",
            ContentClass::Positive => "positive",
            ContentClass::Occupation => "occupation",
        })
    }
}

/// The seven sentence subsets, in canonical (a)..(g) order. Each sentence
/// belongs to exactly one formality, one politeness, and one content subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetName {
    Informal,
    Formal,
    Impolite,
    Polite,
    Negative,
    Positive,
    Occupation,
}

impl SubsetName {
    pub const ALL: [SubsetName; 7] = [
        SubsetName::Informal,
        SubsetName::Formal,
        SubsetName::Impolite,
        SubsetName::Polite,
        SubsetName::Negative,
        SubsetName::Positive,
        SubsetName::Occupation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SubsetName::Informal => "informal",
            SubsetName::Formal => "formal",
            SubsetName::Impolite => "impolite",
            SubsetName::Polite => "polite",
            SubsetName::Negative => "negative",
            SubsetName::Positive => "positive",
            SubsetName::Occupation => "occupation",
        }
    }

    /// Row letter used in score tables: (a) informal .. (g) occupation.
    pub fn letter(&self) -> char {
        (b'a' + Self::ALL.iter().position(|s| s == self).unwrap() as u8) as char
    }

    pub fn parse(s: &str) -> Option<SubsetName> {
        Self::ALL.iter().copied().find(|n| n.as_str() == s)
    }
}

impl fmt::Display for SubsetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One rendered source sentence.
///
/// `text_romanized` is informational: the per-morpheme Yale strings joined in
/// template order, with the lexicon id standing in for the content word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EecSentence {
    pub sentence_id: String,
    pub text_hangul: String,
    pub text_romanized: String,
    pub formality: Formality,
    pub politeness: Politeness,
    pub entry_ref: String,
    pub content_class: ContentClass,
}

impl EecSentence {
    /// The three subsets this sentence belongs to.
    pub fn subsets(&self) -> [SubsetName; 3] {
        let formality = match self.formality {
            Formality::Informal => SubsetName::Informal,
            Formality::Formal => SubsetName::Formal,
        };
        let politeness = match self.politeness {
            Politeness::Impolite => SubsetName::Impolite,
            Politeness::Polite => SubsetName::Polite,
        };
        let content = match self.content_class {
            ContentClass::Negative => SubsetName::Negative,
            ContentClass::Positive => SubsetName::Positive,
            ContentClass::Occupation => SubsetName::Occupation,
        };
        [formality, politeness, content]
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("entry {id} has unresolved violations: {violations:?}")]
    InvalidEntry {
        id: String,
        violations: Vec<Violation>,
    },
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("lexicon has no valid entries")]
    EmptyLexicon,
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("corpus file has no sentences")]
    EmptyCorpus,
    #[error("duplicate sentence_id {id}")]
    DuplicateSentenceId { id: String },
    #[error("corpus line {line}: {message}")]
    FormatError { line: usize, message: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

const PRONOUN_INFORMAL: (&str, &str) = ("걔는", "kyay-nun");
const PRONOUN_FORMAL: (&str, &str) = ("그 사람은", "ku salam-un");
const PREDICATE_IMPOLITE: (&str, &str) = ("해", "hay");
const PREDICATE_POLITE: (&str, &str) = ("해요", "hayyo");
const COPULA_OPEN_IMPOLITE: (&str, &str) = ("야", "ya");
const COPULA_OPEN_POLITE: (&str, &str) = ("예요", "yeyyo");
const COPULA_CLOSED_IMPOLITE: (&str, &str) = ("이야", "iya");
const COPULA_CLOSED_POLITE: (&str, &str) = ("이에요", "ieyyo");

fn content_class_of(entry: &LexiconEntry) -> Option<ContentClass> {
    match (entry.category, entry.polarity) {
        (Category::Occupation, _) => Some(ContentClass::Occupation),
        (Category::Sentiment, Polarity::Positive) => Some(ContentClass::Positive),
        (Category::Sentiment, Polarity::Negative) => Some(ContentClass::Negative),
        (Category::Sentiment, Polarity::Neutral) => None,
    }
}

/// Renders one sentence from a valid entry.
///
/// Predicates take 해/해요 directly; noun phrases take the copula form picked
/// by the batchim rule on the final syllable (야/예요 after an open syllable,
/// 이야/이에요 after a closed one).
pub fn render_sentence(
    entry: &LexiconEntry,
    formality: Formality,
    politeness: Politeness,
) -> Result<EecSentence, RenderError> {
    let violations = validate_entry(entry);
    if !violations.is_empty() {
        return Err(RenderError::InvalidEntry {
            id: entry.id.clone(),
            violations,
        });
    }

    let (pronoun, pronoun_yale) = match formality {
        Formality::Informal => PRONOUN_INFORMAL,
        Formality::Formal => PRONOUN_FORMAL,
    };
    let surface = entry.surface_hangul.trim();
    let (suffix, suffix_yale) = match entry.slot {
        Slot::Predicate => match politeness {
            Politeness::Impolite => PREDICATE_IMPOLITE,
            Politeness::Polite => PREDICATE_POLITE,
        },
        Slot::NounPhrase => {
            let last = hangul::final_syllable(surface).expect("validated entry has a surface");
            let closed = hangul::batchim_final(last).expect("validated entry ends in hangul");
            match (closed, politeness) {
                (false, Politeness::Impolite) => COPULA_OPEN_IMPOLITE,
                (false, Politeness::Polite) => COPULA_OPEN_POLITE,
                (true, Politeness::Impolite) => COPULA_CLOSED_IMPOLITE,
                (true, Politeness::Polite) => COPULA_CLOSED_POLITE,
            }
        }
    };
    let content_class = content_class_of(entry).expect("validated entry maps to a content class");

    Ok(EecSentence {
        sentence_id: format!("{}-{}-{}", entry.id, formality, politeness),
        text_hangul: format!("{pronoun} {surface}{suffix}"),
        text_romanized: format!("{pronoun_yale} {}-{suffix_yale}", entry.id),
        formality,
        politeness,
        entry_ref: entry.id.clone(),
        content_class,
    })
}

/// The full generated corpus plus its subset index.
#[derive(Debug, Clone, PartialEq)]
pub struct EecCorpus {
    sentences: Vec<EecSentence>,
    subset_index: BTreeMap<SubsetName, Vec<String>>,
}

impl EecCorpus {
    /// Expands every lexicon entry into its four sentences, in canonical
    /// order: entry id, then informal before formal, then impolite before
    /// polite.
    pub fn generate(lexicon: &Lexicon) -> Result<Self, CorpusError> {
        if lexicon.is_empty() {
            return Err(CorpusError::EmptyLexicon);
        }
        let mut sentences = Vec::with_capacity(lexicon.len() * 4);
        for entry in lexicon.entries() {
            for formality in [Formality::Informal, Formality::Formal] {
                for politeness in [Politeness::Impolite, Politeness::Polite] {
                    sentences.push(render_sentence(entry, formality, politeness)?);
                }
            }
        }
        Self::from_sentences(sentences)
    }

    /// Rebuilds a corpus (and its subset index) from sentences, e.g. ones
    /// read back from disk.
    pub fn from_sentences(sentences: Vec<EecSentence>) -> Result<Self, CorpusError> {
        if sentences.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut subset_index: BTreeMap<SubsetName, Vec<String>> =
            SubsetName::ALL.iter().map(|n| (*n, Vec::new())).collect();
        let mut seen = std::collections::HashSet::new();
        for sentence in &sentences {
            if !seen.insert(sentence.sentence_id.clone()) {
                return Err(CorpusError::DuplicateSentenceId {
                    id: sentence.sentence_id.clone(),
                });
            }
            for subset in sentence.subsets() {
                subset_index
                    .get_mut(&subset)
                    .unwrap()
                    .push(sentence.sentence_id.clone());
            }
        }
        Ok(EecCorpus {
            sentences,
            subset_index,
        })
    }

    pub fn sentences(&self) -> &[EecSentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn subset_index(&self) -> &BTreeMap<SubsetName, Vec<String>> {
        &self.subset_index
    }

    pub fn subset_ids(&self, name: SubsetName) -> &[String] {
        &self.subset_index[&name]
    }

    /// One sentence per line as JSON.
    pub fn write_jsonl(&self, path: &Path) -> Result<(), CorpusError> {
        let mut buf = String::new();
        for sentence in &self.sentences {
            buf.push_str(&serde_json::to_string(sentence).expect("sentence serializes"));
            buf.push('\n');
        }
        write_file(path, buf.as_bytes())
    }

    pub fn read_jsonl(path: &Path) -> Result<Self, CorpusError> {
        let raw = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut sentences = Vec::new();
        for (idx, line) in raw.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let sentence: EecSentence =
                serde_json::from_str(line).map_err(|e| CorpusError::FormatError {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            sentences.push(sentence);
        }
        Self::from_sentences(sentences)
    }

    /// Sidecar JSON mapping each subset name to its member sentence ids.
    pub fn write_subset_index(&self, path: &Path) -> Result<(), CorpusError> {
        let mut doc = serde_json::Map::new();
        for name in SubsetName::ALL {
            let ids: Vec<&str> = self.subset_index[&name]
                .iter()
                .map(String::as_str)
                .collect();
            doc.insert(name.as_str().to_string(), serde_json::json!(ids));
        }
        let mut body = serde_json::to_string_pretty(&doc).expect("index serializes");
        body.push('\n');
        write_file(path, body.as_bytes())
    }

    /// Plain-text export, one Hangul sentence per line. Templates emit no
    /// terminal punctuation; `append_period` adds one per line for systems
    /// that expect it.
    pub fn write_plain_text(&self, path: &Path, append_period: bool) -> Result<(), CorpusError> {
        let mut buf = String::new();
        for sentence in &self.sentences {
            buf.push_str(&sentence.text_hangul);
            if append_period {
                buf.push('.');
            }
            buf.push('\n');
        }
        write_file(path, buf.as_bytes())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    fs::write(path, bytes).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}
