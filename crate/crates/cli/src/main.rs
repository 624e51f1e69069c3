//! `tgbi`: generate a Korean equity evaluation corpus, translate it through
//! configured backends, classify the English outputs by gender, and score
//! each backend's translation gender bias index.
//!
//! Each pipeline stage is a subcommand that reads and writes plain files, so
//! any stage can be re-run offline from the previous stage's artifacts.

mod support;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tgbi_core::eec::{ContentClass, EecCorpus, SubsetName};
use tgbi_core::gateway::{
    read_records, write_records, BackendDescriptor, Gateway, TranslationCache,
};
use tgbi_core::lexicon::{Lexicon, LexiconFormat};
use tgbi_core::metrics::{verify_bounds, PropertyCheck};
use tgbi_core::reference::{consistency_checks, rounding_interval_checks};
use tgbi_core::report::{write_report_json, EvaluationReport, ReportFile};
use tgbi_core::simlab::{run_subset_demo, SyntheticPolicy, TargetPortions};

use support::{
    ensure_dir, label_records, load_lexicon, read_corpus, score_backend, select_wordlists,
    write_comparison, write_manifest, BackendRunEntry, RunConfig, RunManifest, EXIT_OK,
    EXIT_PARTIAL,
};

#[derive(Parser)]
#[command(
    name = "tgbi",
    about = "Translation gender bias evaluation over a generated Korean corpus",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Generate the evaluation corpus from a lexicon file.
    Generate(GenerateArgs),
    /// Translate a corpus through one or more configured backends.
    Translate(TranslateArgs),
    /// Classify persisted translation records and score each backend.
    Score(ScoreArgs),
    /// Run the whole pipeline from a JSON run config.
    Eval(EvalArgs),
    /// Score two built-in synthetic policies on the bundled demo lexicon.
    Demo(DemoArgs),
    /// Check the analytic properties of the score and the built-in
    /// reference table's internal consistency.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Jsonl,
}

impl From<FormatArg> for LexiconFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Tsv => LexiconFormat::Tsv,
            FormatArg::Jsonl => LexiconFormat::Jsonl,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Lexicon file (TSV or JSONL).
    #[arg(long)]
    lexicon: PathBuf,
    /// Lexicon format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Directory for corpus.jsonl, subsets.json, and corpus.txt.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// End each plain-text sentence with a period.
    #[arg(long)]
    append_period: bool,
}

#[derive(Args)]
struct TranslateArgs {
    /// Corpus JSONL produced by `generate`.
    #[arg(long)]
    corpus: PathBuf,
    /// Backend descriptor JSON; repeat for several backends.
    #[arg(long = "backend", required = true)]
    backends: Vec<PathBuf>,
    /// Directory for records-<backend>.jsonl and failure lists.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Translation cache file shared by every backend (default:
    /// <out>/cache.jsonl).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Keep going when some sentences fail; exit 2 instead of 1.
    #[arg(long)]
    allow_partial: bool,
    /// Send each source sentence with a trailing period.
    #[arg(long)]
    append_period: bool,
}

#[derive(Args)]
struct ScoreArgs {
    /// Corpus JSONL the records were translated from.
    #[arg(long)]
    corpus: PathBuf,
    /// Records JSONL produced by `translate`; repeat per backend.
    #[arg(long = "records", required = true)]
    records: Vec<PathBuf>,
    /// JSON file overriding the built-in gender wordlists.
    #[arg(long)]
    wordlists: Option<PathBuf>,
    /// Use the small core wordlists instead of the extended defaults.
    #[arg(long, conflicts_with = "wordlists")]
    minimal_wordlists: bool,
    /// Directory for report-<backend>.json and the comparison table.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Score backends whose records do not cover the whole corpus.
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Run config JSON (lexicon, backends, output directory, flags).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow partial coverage even if the config does not.
    #[arg(long)]
    allow_partial: bool,
    /// Append periods even if the config does not.
    #[arg(long)]
    append_period: bool,
    /// Use the small core wordlists even if the config does not.
    #[arg(long)]
    minimal_wordlists: bool,
}

#[derive(Args)]
struct DemoArgs {
    /// Synthetic policy JSON to run instead of the built-in pair.
    #[arg(long)]
    policy: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random simplex samples for the bound checks.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Seed for the sample generator.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Commands::Generate(args) => run_generate(args),
        Commands::Translate(args) => run_translate(args),
        Commands::Score(args) => run_score(args),
        Commands::Eval(args) => run_eval(args),
        Commands::Demo(args) => run_demo(args),
        Commands::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run_generate(args: GenerateArgs) -> Result<u8> {
    ensure_dir(&args.out)?;
    let lexicon = load_lexicon(&args.lexicon, args.format.map(Into::into), &args.out)?;
    let corpus = generate_corpus_artifacts(&lexicon, &args.out, args.append_period)?;
    print_subset_sizes(&corpus);
    Ok(EXIT_OK)
}

fn generate_corpus_artifacts(
    lexicon: &Lexicon,
    out: &Path,
    append_period: bool,
) -> Result<EecCorpus> {
    let corpus = EecCorpus::generate(lexicon)?;
    corpus.write_jsonl(&out.join("corpus.jsonl"))?;
    corpus.write_subset_index(&out.join("subsets.json"))?;
    corpus.write_plain_text(&out.join("corpus.txt"), append_period)?;
    println!(
        "corpus: {} sentences written to {}",
        corpus.len(),
        out.join("corpus.jsonl").display()
    );
    Ok(corpus)
}

fn print_subset_sizes(corpus: &EecCorpus) {
    for name in SubsetName::ALL {
        println!(
            "  ({}) {:<10} {}",
            name.letter(),
            name,
            corpus.subset_ids(name).len()
        );
    }
}

fn run_translate(args: TranslateArgs) -> Result<u8> {
    ensure_dir(&args.out)?;
    let corpus = read_corpus(&args.corpus)?;
    let cache_path = args
        .cache
        .clone()
        .unwrap_or_else(|| args.out.join("cache.jsonl"));
    let mut any_failures = false;
    for config_path in &args.backends {
        let backend = BackendDescriptor::from_json_file(config_path)?;
        let outcome = translate_one(
            &corpus,
            &backend,
            &cache_path,
            args.append_period,
            &args.out,
        )?;
        any_failures |= outcome > 0;
    }
    finish_partial(any_failures, args.allow_partial, "translation failures")
}

/// Runs one backend over the corpus, persists its records and failures, and
/// returns the failure count.
fn translate_one(
    corpus: &EecCorpus,
    backend: &BackendDescriptor,
    cache_path: &Path,
    append_period: bool,
    out: &Path,
) -> Result<usize> {
    let cache = TranslationCache::open(cache_path)?;
    let gateway = Gateway::new()
        .with_cache(cache)
        .with_append_period(append_period);
    let outcome = gateway
        .translate_batch(corpus, backend)
        .with_context(|| format!("backend {}", backend.backend_id))?;
    let records_path = out.join(format!("records-{}.jsonl", backend.backend_id));
    write_records(&records_path, &outcome.records)?;
    let cached = outcome.records.iter().filter(|r| r.from_cache).count();
    println!(
        "backend {}: {} translated ({} from cache), {} failed, records in {}",
        backend.backend_id,
        outcome.records.len(),
        cached,
        outcome.failures.len(),
        records_path.display()
    );
    if !outcome.failures.is_empty() {
        let failures_path = out.join(format!("failures-{}.jsonl", backend.backend_id));
        let mut text = String::new();
        for failure in &outcome.failures {
            text.push_str(&serde_json::to_string(failure)?);
            text.push('\n');
        }
        std::fs::write(&failures_path, text)
            .with_context(|| format!("writing {}", failures_path.display()))?;
        println!("  failure details in {}", failures_path.display());
    }
    Ok(outcome.failures.len())
}

fn finish_partial(partial: bool, allowed: bool, what: &str) -> Result<u8> {
    if !partial {
        Ok(EXIT_OK)
    } else if allowed {
        println!("warning: {what}; continuing because --allow-partial is set");
        Ok(EXIT_PARTIAL)
    } else {
        bail!("{what}; re-run with --allow-partial to accept reduced coverage");
    }
}

fn run_score(args: ScoreArgs) -> Result<u8> {
    ensure_dir(&args.out)?;
    let corpus = read_corpus(&args.corpus)?;
    let lists = select_wordlists(args.minimal_wordlists, args.wordlists.as_deref())?;
    let mut report_files = Vec::new();
    let mut any_partial = false;
    for records_path in &args.records {
        let mut records = read_records(records_path)?;
        if records.is_empty() {
            bail!("records file {} is empty", records_path.display());
        }
        let backend_id = records[0].backend_id.clone();
        let labels = label_records(&mut records, &lists)?;
        write_records(records_path, &records)?;
        let (report, partial) = score_backend(&corpus, &backend_id, &labels, args.allow_partial)?;
        any_partial |= partial;
        let file = report.to_file();
        write_report_json(&args.out.join(format!("report-{backend_id}.json")), &file)?;
        report_files.push(file);
    }
    write_comparison(&args.out, &report_files)?;
    finish_partial(any_partial, true, "partial coverage")
}

fn run_eval(args: EvalArgs) -> Result<u8> {
    let mut config = RunConfig::from_json_file(&args.config)?;
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    config.flags.allow_partial |= args.allow_partial;
    config.flags.append_period |= args.append_period;
    config.flags.minimal_wordlists |= args.minimal_wordlists;

    let out = config.output_dir.clone();
    ensure_dir(&out)?;
    let lexicon = load_lexicon(&config.lexicon_path, None, &out)?;
    let corpus = generate_corpus_artifacts(&lexicon, &out, config.flags.append_period)?;
    let lists = select_wordlists(
        config.flags.minimal_wordlists,
        config.wordlist_override_path.as_deref(),
    )?;

    let cache_path = out.join("cache.jsonl");
    let mut report_files = Vec::new();
    let mut manifest_backends = Vec::new();
    let mut any_failures = false;
    for backend in &config.backends {
        let failures = translate_one(
            &corpus,
            backend,
            &cache_path,
            config.flags.append_period,
            &out,
        )?;
        any_failures |= failures > 0;
        if failures > 0 && !config.flags.allow_partial {
            bail!(
                "backend {}: {failures} sentences failed; re-run with --allow-partial \
                 to score the rest",
                backend.backend_id
            );
        }
        let records_path = out.join(format!("records-{}.jsonl", backend.backend_id));
        let mut records = read_records(&records_path)?;
        let labels = label_records(&mut records, &lists)?;
        write_records(&records_path, &records)?;
        let (report, _) = score_backend(
            &corpus,
            &backend.backend_id,
            &labels,
            config.flags.allow_partial,
        )?;
        let report_path = out.join(format!("report-{}.json", backend.backend_id));
        let file = report.to_file();
        write_report_json(&report_path, &file)?;
        manifest_backends.push(BackendRunEntry {
            backend_id: backend.backend_id.clone(),
            records_path: records_path.to_string_lossy().into_owned(),
            report_path: report_path.to_string_lossy().into_owned(),
            coverage: report.coverage,
            failures,
        });
        report_files.push(file);
    }
    write_comparison(&out, &report_files)?;
    write_manifest(
        &out,
        &RunManifest {
            run_id: uuid::Uuid::new_v4().to_string(),
            created_at: chrono::Utc::now(),
            lexicon_path: config.lexicon_path.to_string_lossy().into_owned(),
            corpus_path: out.join("corpus.jsonl").to_string_lossy().into_owned(),
            backends: manifest_backends,
        },
    )?;
    finish_partial(any_failures, true, "partial coverage")
}

const DEMO_LEXICON_TSV: &str = include_str!("../../../data/demo-lexicon.tsv");

fn run_demo(args: DemoArgs) -> Result<u8> {
    let outcome = Lexicon::parse("demo-lexicon", DEMO_LEXICON_TSV, LexiconFormat::Tsv)?;
    let corpus = EecCorpus::generate(&outcome.lexicon)?;
    println!(
        "demo corpus: {} sentences from {} lexicon entries",
        corpus.len(),
        outcome.lexicon.len()
    );

    let runs: Vec<(String, SyntheticPolicy)> = match args.policy {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading policy {}", path.display()))?;
            let policy: SyntheticPolicy = serde_json::from_str(&text)
                .with_context(|| format!("parsing policy {}", path.display()))?;
            vec![("custom-policy".to_string(), policy)]
        }
        None => vec![
            (
                "all-neutral".to_string(),
                SyntheticPolicy::FixedPortions {
                    target: TargetPortions::new(0.0, 0.0, 1.0),
                    seed: 0,
                },
            ),
            (
                "class-biased".to_string(),
                SyntheticPolicy::PerSubsetPortions {
                    targets: BTreeMap::from([
                        (ContentClass::Positive, TargetPortions::new(1.0, 0.0, 0.0)),
                        (ContentClass::Negative, TargetPortions::new(0.0, 1.0, 0.0)),
                        (ContentClass::Occupation, TargetPortions::new(0.0, 0.0, 1.0)),
                    ]),
                    seed: 7,
                },
            ),
        ],
    };

    let mut files: Vec<ReportFile> = Vec::new();
    for (name, policy) in &runs {
        let demo = run_subset_demo(&corpus, policy)?;
        let report = EvaluationReport::new(name.clone(), demo.scores, 1.0)?;
        files.push(report.to_file());
    }
    print!("{}", tgbi_core::report::comparison_markdown(&files));
    if files.len() == 2 {
        println!(
            "\nThe class-biased policy gendered every sentiment entry, so the \
             positive and negative subsets score 0.0 even though the mixed \
             style subsets stay near their optimum. The average catches what \
             a single aggregate would hide."
        );
    }
    Ok(EXIT_OK)
}

fn run_verify(args: VerifyArgs) -> Result<u8> {
    let started = Instant::now();
    let report = verify_bounds(args.samples, args.seed);
    println!(
        "bound checks over {} samples (seed {}):",
        report.samples, report.seed
    );
    let mut all_passed = print_checks(&report.checks);

    println!("reference score consistency:");
    all_passed &= print_checks(&consistency_checks());

    println!("diagnostics (4-decimal rounding intervals, informational):");
    print_checks(&rounding_interval_checks());

    println!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    if all_passed {
        println!("verify: all checks passed");
        Ok(EXIT_OK)
    } else {
        bail!("verify: at least one check failed");
    }
}

fn print_checks(checks: &[PropertyCheck]) -> bool {
    let mut all_passed = true;
    for check in checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("  {status} {}: {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    all_passed
}
