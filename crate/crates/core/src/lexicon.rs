//! Curated Korean lexicon: entry model, file ingestion, and validation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::hangul;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Sentiment,
    Occupation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Predicate,
    NounPhrase,
}

/// Reasons an otherwise well-formed word was excluded from the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionFlag {
    Appearance,
    Richness,
    SexualOrientation,
    Disability,
    AcademicBackground,
    OccupationOrStatus,
    GenderSpecific,
    HateTerm,
}

impl ExclusionFlag {
    pub const ALL: [ExclusionFlag; 8] = [
        ExclusionFlag::Appearance,
        ExclusionFlag::Richness,
        ExclusionFlag::SexualOrientation,
        ExclusionFlag::Disability,
        ExclusionFlag::AcademicBackground,
        ExclusionFlag::OccupationOrStatus,
        ExclusionFlag::GenderSpecific,
        ExclusionFlag::HateTerm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExclusionFlag::Appearance => "appearance",
            ExclusionFlag::Richness => "richness",
            ExclusionFlag::SexualOrientation => "sexual_orientation",
            ExclusionFlag::Disability => "disability",
            ExclusionFlag::AcademicBackground => "academic_background",
            ExclusionFlag::OccupationOrStatus => "occupation_or_status",
            ExclusionFlag::GenderSpecific => "gender_specific",
            ExclusionFlag::HateTerm => "hate_term",
        }
    }
}

/// One curated word with its template slot and filtering metadata.
///
/// `surface_hangul` is stored in the exact form the sentence templates splice
/// in; no inflection happens at render time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconEntry {
    /// Stable slug: lowercase Yale romanization, hyphen-separated.
    pub id: String,
    pub surface_hangul: String,
    pub category: Category,
    pub polarity: Polarity,
    pub slot: Slot,
    #[serde(default)]
    pub exclusion_flags: BTreeSet<ExclusionFlag>,
}

/// A single validation finding for a lexicon row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyId,
    IdNotSlug,
    EmptySurface,
    MissingHangulSyllable,
    OccupationMustBeNeutral,
    OccupationMustBeNounPhrase,
    SentimentMustBePolar,
    NounPhraseMustEndInHangul,
    ExcludedCategory(ExclusionFlag),
    DuplicateId,
    DuplicateSurfaceInCategory,
    /// Same surface reused by another category. Reported as a warning; the
    /// entry is kept.
    CrossCategorySurfaceReuse,
    UnknownCategory(String),
    UnknownPolarity(String),
    UnknownSlot(String),
    UnknownExclusionFlag(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyId => write!(f, "empty_id"),
            Violation::IdNotSlug => write!(f, "id_not_slug"),
            Violation::EmptySurface => write!(f, "empty_surface"),
            Violation::MissingHangulSyllable => write!(f, "missing_hangul_syllable"),
            Violation::OccupationMustBeNeutral => write!(f, "occupation_must_be_neutral"),
            Violation::OccupationMustBeNounPhrase => write!(f, "occupation_must_be_noun_phrase"),
            Violation::SentimentMustBePolar => write!(f, "sentiment_must_be_polar"),
            Violation::NounPhraseMustEndInHangul => write!(f, "noun_phrase_must_end_in_hangul"),
            Violation::ExcludedCategory(flag) => write!(f, "excluded_category:{}", flag.as_str()),
            Violation::DuplicateId => write!(f, "duplicate_id"),
            Violation::DuplicateSurfaceInCategory => write!(f, "duplicate_surface_in_category"),
            Violation::CrossCategorySurfaceReuse => write!(f, "cross_category_surface_reuse"),
            Violation::UnknownCategory(v) => write!(f, "unknown_category:{v}"),
            Violation::UnknownPolarity(v) => write!(f, "unknown_polarity:{v}"),
            Violation::UnknownSlot(v) => write!(f, "unknown_slot:{v}"),
            Violation::UnknownExclusionFlag(v) => write!(f, "unknown_exclusion_flag:{v}"),
        }
    }
}

impl Serialize for Violation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A rejected (or, for warnings, flagged) input row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// 1-based line number in the source file.
    pub line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconFormat {
    Tsv,
    Jsonl,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon file {path}: {source}")]
    FileUnreadable {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("lexicon line {line}: {message}")]
    FormatError { line: usize, message: String },
    #[error("cannot write rejection report {path}: {source}")]
    ReportUnwritable {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// A validated lexicon. Entries are sorted by id and each passes
/// [`validate_entry`] with no findings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub source_name: String,
    entries: Vec<LexiconEntry>,
}

/// Result of ingesting a lexicon file: the valid entries plus everything
/// that was dropped (`rejections`) or kept with a caveat (`warnings`).
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub lexicon: Lexicon,
    pub rejections: Vec<Rejection>,
    pub warnings: Vec<Rejection>,
}

const TSV_HEADER: &str = "id\tsurface_hangul\tcategory\tpolarity\tslot\texclusion_flags";

impl Lexicon {
    /// Loads and validates a lexicon file. Rows that fail validation are
    /// collected as rejections instead of aborting the load; structurally
    /// broken rows (wrong column count, invalid JSON) abort with
    /// [`LexiconError::FormatError`].
    pub fn load(path: &Path, format: LexiconFormat) -> Result<LoadOutcome, LexiconError> {
        let raw = fs::read_to_string(path).map_err(|source| LexiconError::FileUnreadable {
            path: path.display().to_string(),
            source,
        })?;
        let source_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::parse(&source_name, &raw, format)
    }

    /// Parses lexicon text already in memory, e.g. embedded data.
    pub fn parse(
        source_name: &str,
        raw: &str,
        format: LexiconFormat,
    ) -> Result<LoadOutcome, LexiconError> {
        let rows = match format {
            LexiconFormat::Tsv => parse_tsv(raw)?,
            LexiconFormat::Jsonl => parse_jsonl(raw)?,
        };
        Ok(build_outcome(source_name.to_string(), rows))
    }

    /// Runs the same validation and deduplication pipeline over in-memory
    /// entries. Row numbers in rejections are 1-based positions in `entries`.
    pub fn from_entries(source_name: &str, entries: Vec<LexiconEntry>) -> LoadOutcome {
        let rows = entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| (i + 1, RawRow::Parsed(Box::new(e))))
            .collect();
        build_outcome(source_name.to_string(), rows)
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry counts by polarity.
    pub fn counts(&self) -> BTreeMap<Polarity, usize> {
        let mut counts = BTreeMap::new();
        for entry in &self.entries {
            *counts.entry(entry.polarity).or_insert(0) += 1;
        }
        counts
    }
}

/// Checks one entry against the lexicon rules. Empty result means valid.
pub fn validate_entry(entry: &LexiconEntry) -> Vec<Violation> {
    let mut violations = Vec::new();

    if entry.id.is_empty() {
        violations.push(Violation::EmptyId);
    } else if !entry
        .id
        .chars()
        .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
    {
        violations.push(Violation::IdNotSlug);
    }

    let surface = entry.surface_hangul.trim();
    if surface.is_empty() {
        violations.push(Violation::EmptySurface);
    } else {
        if !surface.chars().any(hangul::is_hangul_syllable) {
            violations.push(Violation::MissingHangulSyllable);
        }
        if entry.slot == Slot::NounPhrase
            && !hangul::final_syllable(surface)
                .map(hangul::is_hangul_syllable)
                .unwrap_or(false)
        {
            violations.push(Violation::NounPhraseMustEndInHangul);
        }
    }

    if entry.category == Category::Occupation {
        if entry.polarity != Polarity::Neutral {
            violations.push(Violation::OccupationMustBeNeutral);
        }
        if entry.slot != Slot::NounPhrase {
            violations.push(Violation::OccupationMustBeNounPhrase);
        }
    }
    if entry.category == Category::Sentiment && entry.polarity == Polarity::Neutral {
        violations.push(Violation::SentimentMustBePolar);
    }

    for flag in &entry.exclusion_flags {
        violations.push(Violation::ExcludedCategory(*flag));
    }

    violations
}

/// Writes rejections followed by warnings as one JSONL report.
pub fn write_rejection_report(path: &Path, outcome: &LoadOutcome) -> Result<(), LexiconError> {
    let mut buf = Vec::new();
    for rejection in outcome.rejections.iter().chain(outcome.warnings.iter()) {
        let line = serde_json::to_string(rejection).expect("rejection serializes");
        buf.write_all(line.as_bytes()).expect("vec write");
        buf.push(b'\n');
    }
    fs::write(path, buf).map_err(|source| LexiconError::ReportUnwritable {
        path: path.display().to_string(),
        source,
    })
}

enum RawRow {
    Parsed(Box<LexiconEntry>),
    /// Structurally sound row whose enum fields did not parse.
    Unconverted {
        id: Option<String>,
        violations: Vec<Violation>,
    },
}

fn parse_tsv(raw: &str) -> Result<Vec<(usize, RawRow)>, LexiconError> {
    let mut rows = Vec::new();
    let mut lines = raw.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == TSV_HEADER => {}
        Some((_, header)) => {
            return Err(LexiconError::FormatError {
                line: 1,
                message: format!("expected header {TSV_HEADER:?}, found {header:?}"),
            })
        }
        None => {
            return Err(LexiconError::FormatError {
                line: 1,
                message: "empty file, expected header row".to_string(),
            })
        }
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 && fields.len() != 6 {
            return Err(LexiconError::FormatError {
                line: line_no,
                message: format!(
                    "expected 5 or 6 tab-separated columns (exclusion_flags may be omitted), found {}",
                    fields.len()
                ),
            });
        }
        let flags = fields
            .get(5)
            .copied()
            .unwrap_or("")
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(str::to_string)
            .collect();
        rows.push((
            line_no,
            convert_row(
                fields[0].to_string(),
                fields[1].to_string(),
                fields[2],
                fields[3],
                fields[4],
                flags,
            ),
        ));
    }
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlRow {
    id: String,
    surface_hangul: String,
    category: String,
    polarity: String,
    slot: String,
    #[serde(default)]
    exclusion_flags: Vec<String>,
}

fn parse_jsonl(raw: &str) -> Result<Vec<(usize, RawRow)>, LexiconError> {
    let mut rows = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonlRow = serde_json::from_str(line).map_err(|e| LexiconError::FormatError {
            line: line_no,
            message: e.to_string(),
        })?;
        rows.push((
            line_no,
            convert_row(
                row.id,
                row.surface_hangul,
                &row.category,
                &row.polarity,
                &row.slot,
                row.exclusion_flags,
            ),
        ));
    }
    Ok(rows)
}

fn convert_row(
    id: String,
    surface_hangul: String,
    category: &str,
    polarity: &str,
    slot: &str,
    flags: Vec<String>,
) -> RawRow {
    let mut violations = Vec::new();
    let category = match parse_keyword(category) {
        k if k == "sentiment" => Some(Category::Sentiment),
        k if k == "occupation" => Some(Category::Occupation),
        _ => {
            violations.push(Violation::UnknownCategory(category.to_string()));
            None
        }
    };
    let polarity = match parse_keyword(polarity) {
        k if k == "positive" => Some(Polarity::Positive),
        k if k == "negative" => Some(Polarity::Negative),
        k if k == "neutral" => Some(Polarity::Neutral),
        _ => {
            violations.push(Violation::UnknownPolarity(polarity.to_string()));
            None
        }
    };
    let slot = match parse_keyword(slot) {
        k if k == "predicate" => Some(Slot::Predicate),
        k if k == "nounphrase" => Some(Slot::NounPhrase),
        _ => {
            violations.push(Violation::UnknownSlot(slot.to_string()));
            None
        }
    };
    let mut flag_set = BTreeSet::new();
    for flag in flags {
        let key = parse_keyword(&flag);
        match ExclusionFlag::ALL
            .iter()
            .find(|f| parse_keyword(f.as_str()) == key)
        {
            Some(f) => {
                flag_set.insert(*f);
            }
            None => violations.push(Violation::UnknownExclusionFlag(flag)),
        }
    }
    if !violations.is_empty() {
        let id = if id.is_empty() { None } else { Some(id) };
        return RawRow::Unconverted { id, violations };
    }
    RawRow::Parsed(Box::new(LexiconEntry {
        id,
        surface_hangul,
        category: category.unwrap(),
        polarity: polarity.unwrap(),
        slot: slot.unwrap(),
        exclusion_flags: flag_set,
    }))
}

/// Normalizes an enum keyword: lowercased with `_`/`-` stripped, so both
/// `noun_phrase` and `NounPhrase` parse.
fn parse_keyword(s: &str) -> String {
    s.trim()
        .chars()
        .filter(|c| *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

fn build_outcome(source_name: String, rows: Vec<(usize, RawRow)>) -> LoadOutcome {
    let mut rejections = Vec::new();
    let mut warnings = Vec::new();
    let mut accepted: Vec<(usize, LexiconEntry)> = Vec::new();

    for (line, row) in rows {
        match row {
            RawRow::Unconverted { id, violations } => {
                rejections.push(Rejection {
                    line,
                    id,
                    violations,
                });
            }
            RawRow::Parsed(entry) => {
                let violations = validate_entry(&entry);
                if violations.is_empty() {
                    accepted.push((line, *entry));
                } else {
                    rejections.push(Rejection {
                        line,
                        id: Some(entry.id.clone()),
                        violations,
                    });
                }
            }
        }
    }

    let mut seen_ids: HashMap<String, usize> = HashMap::new();
    let mut seen_surfaces: HashMap<(Category, String), usize> = HashMap::new();
    let mut surface_category: HashMap<String, Category> = HashMap::new();
    let mut entries = Vec::new();

    for (line, entry) in accepted {
        if seen_ids.contains_key(&entry.id) {
            rejections.push(Rejection {
                line,
                id: Some(entry.id),
                violations: vec![Violation::DuplicateId],
            });
            continue;
        }
        let surface_key = (entry.category, entry.surface_hangul.clone());
        if seen_surfaces.contains_key(&surface_key) {
            rejections.push(Rejection {
                line,
                id: Some(entry.id),
                violations: vec![Violation::DuplicateSurfaceInCategory],
            });
            continue;
        }
        match surface_category.get(&entry.surface_hangul) {
            Some(category) if *category != entry.category => {
                warnings.push(Rejection {
                    line,
                    id: Some(entry.id.clone()),
                    violations: vec![Violation::CrossCategorySurfaceReuse],
                });
            }
            _ => {
                surface_category.insert(entry.surface_hangul.clone(), entry.category);
            }
        }
        seen_ids.insert(entry.id.clone(), line);
        seen_surfaces.insert(surface_key, line);
        entries.push(entry);
    }

    rejections.sort_by_key(|r| r.line);
    entries.sort_by(|a, b| a.id.cmp(&b.id));

    LoadOutcome {
        lexicon: Lexicon {
            source_name,
            entries,
        },
        rejections,
        warnings,
    }
}
