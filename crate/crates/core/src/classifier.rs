//! Rule-based gender classification of English translations.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Neutral,
}

/// A gendered token found in the input, with the character offset of its
/// first character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenMatch {
    pub token: String,
    pub offset: usize,
}

/// Classification outcome. `evidence` lists every matched gendered token, so
/// Neutral carries either no matches or matches from both lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderLabel {
    pub value: Gender,
    pub evidence: Vec<TokenMatch>,
}

#[derive(Debug, Error)]
pub enum WordlistError {
    #[error("cannot read wordlist file {path}: {source}")]
    FileUnreadable {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("wordlist file is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("token {token:?} appears in both gendered lists")]
    Overlap { token: String },
    #[error("{token:?} is reserved as a neutral marker and cannot be a gendered token")]
    ReservedNeutralToken { token: String },
    #[error("gendered token {token:?} must be a single word")]
    NotSingleWord { token: String },
    #[error("empty token in {list} list")]
    EmptyToken { list: &'static str },
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("cannot classify empty output text")]
    EmptyInput,
}

/// Token sets used by [`classify`]. Tokens are stored lowercase; matching is
/// case-insensitive on token boundaries, never on substrings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenderWordlists {
    female: BTreeSet<String>,
    male: BTreeSet<String>,
    neutral_markers: BTreeSet<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WordlistFile {
    female: Vec<String>,
    male: Vec<String>,
    #[serde(default)]
    neutral_markers: Vec<String>,
}

impl GenderWordlists {
    pub fn new<I, J, K>(female: I, male: J, neutral_markers: K) -> Result<Self, WordlistError>
    where
        I: IntoIterator<Item = String>,
        J: IntoIterator<Item = String>,
        K: IntoIterator<Item = String>,
    {
        let female = normalize_gendered(female, "female")?;
        let male = normalize_gendered(male, "male")?;
        if let Some(token) = female.intersection(&male).next() {
            return Err(WordlistError::Overlap {
                token: token.clone(),
            });
        }
        let mut markers = BTreeSet::new();
        for marker in neutral_markers {
            let marker = marker.trim().to_lowercase();
            if marker.is_empty() {
                return Err(WordlistError::EmptyToken {
                    list: "neutral_markers",
                });
            }
            markers.insert(marker);
        }
        Ok(GenderWordlists {
            female,
            male,
            neutral_markers: markers,
        })
    }

    /// The stock lists: pronoun paradigms plus common person nouns for each
    /// gender, and the neutral phrasings a translator may fall back to.
    pub fn default_lists() -> Self {
        Self::new(
            strings(&[
                "she", "her", "hers", "herself", "woman", "women", "girl", "girls",
            ]),
            strings(&[
                "he", "him", "his", "himself", "man", "men", "guy", "guys", "boy", "boys",
            ]),
            strings(&["the person", "that person", "they"]),
        )
        .expect("stock lists are valid")
    }

    /// The minimal core token set: subject/object pronouns and the bare
    /// singular person nouns only.
    pub fn minimal() -> Self {
        Self::new(
            strings(&["she", "her", "woman", "girl"]),
            strings(&["he", "him", "man", "guy", "boy"]),
            strings(&["the person"]),
        )
        .expect("minimal lists are valid")
    }

    /// Loads a replacement for the defaults from a JSON file with keys
    /// `female`, `male`, and `neutral_markers`.
    pub fn from_json_file(path: &Path) -> Result<Self, WordlistError> {
        let raw = fs::read_to_string(path).map_err(|source| WordlistError::FileUnreadable {
            path: path.display().to_string(),
            source,
        })?;
        let file: WordlistFile = serde_json::from_str(&raw)?;
        Self::new(file.female, file.male, file.neutral_markers)
    }

    /// The same lists with female and male swapped. Classification over
    /// swapped lists must mirror Female and Male and fix Neutral.
    pub fn swapped(&self) -> Self {
        GenderWordlists {
            female: self.male.clone(),
            male: self.female.clone(),
            neutral_markers: self.neutral_markers.clone(),
        }
    }

    pub fn female(&self) -> &BTreeSet<String> {
        &self.female
    }

    pub fn male(&self) -> &BTreeSet<String> {
        &self.male
    }

    pub fn neutral_markers(&self) -> &BTreeSet<String> {
        &self.neutral_markers
    }
}

impl Default for GenderWordlists {
    fn default() -> Self {
        Self::default_lists()
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn normalize_gendered<I: IntoIterator<Item = String>>(
    tokens: I,
    list: &'static str,
) -> Result<BTreeSet<String>, WordlistError> {
    let mut out = BTreeSet::new();
    for token in tokens {
        let token = token.trim().to_lowercase();
        if token.is_empty() {
            return Err(WordlistError::EmptyToken { list });
        }
        if token.chars().any(char::is_whitespace) {
            return Err(WordlistError::NotSingleWord { token });
        }
        if token == "they" {
            return Err(WordlistError::ReservedNeutralToken { token });
        }
        out.insert(token);
    }
    Ok(out)
}

/// Splits on non-letter boundaries, yielding lowercase tokens with the
/// character offset of each token's first character. Apostrophes are
/// boundaries, so clitics split: "He's" -> "he", "s".
fn tokenize(text: &str) -> Vec<(String, usize)> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0usize;
    for (offset, c) in text.chars().enumerate() {
        if c.is_alphabetic() {
            if current.is_empty() {
                start = offset;
            }
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push((std::mem::take(&mut current), start));
        }
    }
    if !current.is_empty() {
        tokens.push((current, start));
    }
    tokens
}

/// Labels one English output.
///
/// Female requires at least one female token and no male token; Male is
/// symmetric; everything else (no gendered tokens, or tokens of both
/// genders) is Neutral. Neutral markers are carried in the wordlists for
/// documentation and reporting but do not influence the decision: text
/// without gendered tokens is Neutral with or without them.
pub fn classify(text: &str, lists: &GenderWordlists) -> Result<GenderLabel, ClassifyError> {
    if text.trim().is_empty() {
        return Err(ClassifyError::EmptyInput);
    }
    let mut evidence = Vec::new();
    let mut female = 0usize;
    let mut male = 0usize;
    for (token, offset) in tokenize(text) {
        let matched = if lists.female.contains(&token) {
            female += 1;
            true
        } else if lists.male.contains(&token) {
            male += 1;
            true
        } else {
            false
        };
        if matched {
            evidence.push(TokenMatch { token, offset });
        }
    }
    let value = match (female, male) {
        (f, 0) if f > 0 => Gender::Female,
        (0, m) if m > 0 => Gender::Male,
        _ => Gender::Neutral,
    };
    Ok(GenderLabel { value, evidence })
}
