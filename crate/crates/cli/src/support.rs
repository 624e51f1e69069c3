//! Shared plumbing for the subcommands: artifact paths, lexicon and corpus
//! loading, wordlist selection, scoring, and the run manifest.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use tgbi_core::classifier::{classify, Gender, GenderWordlists};
use tgbi_core::eec::EecCorpus;
use tgbi_core::gateway::{BackendDescriptor, TranslationRecord};
use tgbi_core::lexicon::{write_rejection_report, Lexicon, LexiconFormat, LoadOutcome};
use tgbi_core::metrics::score_by_subsets;
use tgbi_core::report::{comparison_csv, comparison_markdown, EvaluationReport, ReportFile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARTIAL: u8 = 2;

/// Picks the lexicon format from an explicit choice or the file extension.
pub fn resolve_format(path: &Path, explicit: Option<LexiconFormat>) -> Result<LexiconFormat> {
    if let Some(format) = explicit {
        return Ok(format);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => Ok(LexiconFormat::Tsv),
        Some("jsonl") => Ok(LexiconFormat::Jsonl),
        other => {
            bail!("cannot infer lexicon format from extension {other:?}; pass --format tsv|jsonl")
        }
    }
}

/// Loads a lexicon, writes the rejection report next to the other artifacts
/// when anything was rejected, and summarizes on stdout.
pub fn load_lexicon(path: &Path, format: Option<LexiconFormat>, out_dir: &Path) -> Result<Lexicon> {
    let format = resolve_format(path, format)?;
    let outcome = Lexicon::load(path, format)
        .with_context(|| format!("loading lexicon {}", path.display()))?;
    report_load(&outcome, out_dir)?;
    if outcome.lexicon.is_empty() {
        bail!("lexicon {} has no valid entries", path.display());
    }
    Ok(outcome.lexicon)
}

fn report_load(outcome: &LoadOutcome, out_dir: &Path) -> Result<()> {
    if !outcome.rejections.is_empty() || !outcome.warnings.is_empty() {
        let report_path = out_dir.join("rejections.jsonl");
        write_rejection_report(&report_path, outcome)?;
        println!(
            "lexicon: {} entries accepted, {} rejected, {} warnings ({})",
            outcome.lexicon.len(),
            outcome.rejections.len(),
            outcome.warnings.len(),
            report_path.display()
        );
    } else {
        println!("lexicon: {} entries accepted", outcome.lexicon.len());
    }
    Ok(())
}

pub fn read_corpus(path: &Path) -> Result<EecCorpus> {
    EecCorpus::read_jsonl(path).with_context(|| format!("reading corpus {}", path.display()))
}

/// Chooses the classifier wordlists: an override file wins, then the minimal
/// built-in set, then the extended default.
pub fn select_wordlists(minimal: bool, override_path: Option<&Path>) -> Result<GenderWordlists> {
    if let Some(path) = override_path {
        return GenderWordlists::from_json_file(path)
            .with_context(|| format!("loading wordlists {}", path.display()));
    }
    Ok(if minimal {
        GenderWordlists::minimal()
    } else {
        GenderWordlists::default_lists()
    })
}

/// Fills each record's gender label in place and returns the id → gender map
/// used for scoring.
pub fn label_records(
    records: &mut [TranslationRecord],
    lists: &GenderWordlists,
) -> Result<HashMap<String, Gender>> {
    let mut labels = HashMap::with_capacity(records.len());
    for record in records.iter_mut() {
        let label = classify(&record.output_english, lists)
            .with_context(|| format!("classifying output for {}", record.sentence_id))?;
        labels.insert(record.sentence_id.clone(), label.value);
        record.label = Some(label);
    }
    Ok(labels)
}

/// Scores one backend's labeled records against the corpus. Coverage below
/// one is only allowed with `allow_partial`.
pub fn score_backend(
    corpus: &EecCorpus,
    backend_id: &str,
    labels: &HashMap<String, Gender>,
    allow_partial: bool,
) -> Result<(EvaluationReport, bool)> {
    let covered = corpus
        .sentences()
        .iter()
        .filter(|s| labels.contains_key(&s.sentence_id))
        .count();
    let coverage = covered as f64 / corpus.len() as f64;
    let partial = covered < corpus.len();
    if partial && !allow_partial {
        bail!(
            "backend {backend_id}: only {covered} of {} sentences have outputs; \
             pass --allow-partial to score anyway",
            corpus.len()
        );
    }
    let scores = score_by_subsets(corpus, labels)
        .with_context(|| format!("scoring backend {backend_id}"))?;
    let report = EvaluationReport::new(backend_id, scores, coverage)?;
    Ok((report, partial))
}

/// Writes the comparison table in markdown and CSV and echoes the markdown.
pub fn write_comparison(out_dir: &Path, reports: &[ReportFile]) -> Result<()> {
    let markdown = comparison_markdown(reports);
    let csv_text = comparison_csv(reports);
    fs::write(out_dir.join("comparison.md"), &markdown)
        .with_context(|| format!("writing {}", out_dir.join("comparison.md").display()))?;
    fs::write(out_dir.join("comparison.csv"), csv_text)
        .with_context(|| format!("writing {}", out_dir.join("comparison.csv").display()))?;
    print!("{markdown}");
    Ok(())
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

/// Everything one `eval` run wrote, so later stages can re-run offline.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub created_at: DateTime<Utc>,
    pub lexicon_path: String,
    pub corpus_path: String,
    pub backends: Vec<BackendRunEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BackendRunEntry {
    pub backend_id: String,
    pub records_path: String,
    pub report_path: String,
    pub coverage: f64,
    pub failures: usize,
}

pub fn write_manifest(out_dir: &Path, manifest: &RunManifest) -> Result<()> {
    let path = out_dir.join("run.json");
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Declarative description of a full evaluation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lexicon_path: PathBuf,
    #[serde(default)]
    pub backends: Vec<BackendDescriptor>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub flags: RunFlags,
    #[serde(default)]
    pub wordlist_override_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFlags {
    #[serde(default)]
    pub minimal_wordlists: bool,
    #[serde(default)]
    pub allow_partial: bool,
    #[serde(default)]
    pub append_period: bool,
}

impl RunConfig {
    /// Reads a run config, resolving its relative paths (including fixture
    /// and policy paths inside inline backend descriptors) against the
    /// config file's directory.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading run config {}", path.display()))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing run config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.lexicon_path = resolve_relative(base, &config.lexicon_path);
        config.output_dir = resolve_relative(base, &config.output_dir);
        if let Some(override_path) = config.wordlist_override_path.take() {
            config.wordlist_override_path = Some(resolve_relative(base, &override_path));
        }
        for backend in &mut config.backends {
            for key in ["path", "policy_path"] {
                if let Some(serde_json::Value::String(raw)) = backend.endpoint_config.get(key) {
                    let referenced = PathBuf::from(raw);
                    if referenced.is_relative() {
                        backend.endpoint_config.insert(
                            key.to_string(),
                            serde_json::Value::String(
                                base.join(referenced).to_string_lossy().into_owned(),
                            ),
                        );
                    }
                }
            }
            backend.validate()?;
        }
        if config.backends.is_empty() {
            bail!("run config {} lists no backends", path.display());
        }
        Ok(config)
    }
}

fn resolve_relative(base: &Path, path: &Path) -> PathBuf {
    if path.is_relative() {
        base.join(path)
    } else {
        path.to_path_buf()
    }
}
