//! Acceptance gate: one test per criterion, each printing a single PASS or
//! FAIL line. Expected values were computed by independent counting before
//! implementation and are frozen here.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use tgbi_core::classifier::{classify, Gender, GenderWordlists};
use tgbi_core::eec::{EecCorpus, SubsetName};
use tgbi_core::gateway::{BackendDescriptor, Gateway, TranslationCache};
use tgbi_core::lexicon::{Lexicon, LexiconFormat};
use tgbi_core::metrics::{compute_tgbi, score_by_subsets, verify_bounds, SubsetScore};
use tgbi_core::reference::consistency_checks;
use tgbi_core::report::{write_report_json, EvaluationReport};
use tgbi_core::simlab::{run_subset_demo, synthetic_lexicon, SyntheticPolicy, TargetPortions};

fn workspace_path(relative: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(relative)
}

fn demo_lexicon() -> Lexicon {
    Lexicon::load(&workspace_path("data/demo-lexicon.tsv"), LexiconFormat::Tsv)
        .expect("demo lexicon loads")
        .lexicon
}

fn verdict(number: u8, name: &str, passed: bool, details: &[String]) {
    println!(
        "ACCEPTANCE {number} {name}: {}",
        if passed { "PASS" } else { "FAIL" }
    );
    for detail in details {
        println!("  {detail}");
    }
    assert!(passed, "acceptance criterion {number} ({name}) failed");
}

#[test]
fn acceptance_1_corpus_cardinality() {
    let started = Instant::now();
    let full = synthetic_lexicon(124, 200, 735);
    let corpus = EecCorpus::generate(&full).unwrap();
    let mut details = Vec::new();
    let mut passed = true;

    let mut check = |label: &str, ok: bool, detail: String| {
        if !ok {
            passed = false;
        }
        details.push(format!("{label}: {detail}"));
    };

    check(
        "full-size corpus",
        corpus.len() == 4236,
        format!("{} sentences (want 4236)", corpus.len()),
    );
    let expected_sizes = [
        (SubsetName::Informal, 2118),
        (SubsetName::Formal, 2118),
        (SubsetName::Impolite, 2118),
        (SubsetName::Polite, 2118),
        (SubsetName::Negative, 800),
        (SubsetName::Positive, 496),
        (SubsetName::Occupation, 2940),
    ];
    for (name, want) in expected_sizes {
        let got = corpus.subset_ids(name).len();
        check(
            &format!("subset {name}"),
            got == want,
            format!("{got} (want {want})"),
        );
    }

    let demo_corpus = EecCorpus::generate(&demo_lexicon()).unwrap();
    check(
        "demo corpus size",
        demo_corpus.len() == 4 * demo_lexicon().len(),
        format!(
            "{} sentences from {} entries",
            demo_corpus.len(),
            demo_lexicon().len()
        ),
    );
    for corpus_under_test in [&corpus, &demo_corpus] {
        let total = corpus_under_test.len();
        for partition in [
            vec![SubsetName::Informal, SubsetName::Formal],
            vec![SubsetName::Impolite, SubsetName::Polite],
            vec![
                SubsetName::Negative,
                SubsetName::Positive,
                SubsetName::Occupation,
            ],
        ] {
            let covered: usize = partition
                .iter()
                .map(|name| corpus_under_test.subset_ids(*name).len())
                .sum();
            check(
                &format!("partition {partition:?}"),
                covered == total,
                format!("{covered} ids cover {total} sentences"),
            );
        }
    }

    let elapsed = started.elapsed();
    check(
        "runtime",
        elapsed < Duration::from_secs(1),
        format!("{elapsed:?} (limit 1s)"),
    );
    verdict(1, "corpus cardinality", passed, &details);
}

#[test]
fn acceptance_2_measure_bounds() {
    let started = Instant::now();
    let report = verify_bounds(10_000, 42);
    let mut details = Vec::new();
    let mut passed = report.samples >= 10_000;
    for check in &report.checks {
        if !check.passed {
            passed = false;
        }
        details.push(format!(
            "{}: {} ({})",
            check.name,
            if check.passed { "ok" } else { "VIOLATED" },
            check.detail
        ));
    }
    let elapsed = started.elapsed();
    if elapsed >= Duration::from_secs(1) {
        passed = false;
    }
    details.push(format!("runtime: {elapsed:?} (limit 1s)"));
    verdict(2, "measure bounds", passed, &details);
}

#[test]
fn acceptance_3_published_table_consistency() {
    let checks = consistency_checks();
    let mut details = Vec::new();
    let mut passed = true;
    for check in &checks {
        if !check.passed {
            passed = false;
            details.push(format!("{}: VIOLATED ({})", check.name, check.detail));
        }
    }
    details.push(format!(
        "{} of {} checks hold",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    ));
    verdict(3, "published table consistency", passed, &details);
}

#[test]
fn acceptance_4_fixture_replay_and_cache_stability() {
    let corpus = EecCorpus::generate(&demo_lexicon()).unwrap();
    let backend =
        BackendDescriptor::from_json_file(&workspace_path("data/backends/fixture-demo.json"))
            .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cache_path = dir.path().join("cache.jsonl");
    let mut details = Vec::new();
    let mut passed = true;
    let mut check = |label: &str, ok: bool, detail: String| {
        if !ok {
            passed = false;
        }
        details.push(format!("{label}: {detail}"));
    };

    let expected_counts: [(SubsetName, [u64; 3]); 7] = [
        (SubsetName::Informal, [11, 23, 6]),
        (SubsetName::Formal, [11, 21, 8]),
        (SubsetName::Impolite, [10, 23, 7]),
        (SubsetName::Polite, [12, 21, 7]),
        (SubsetName::Negative, [4, 14, 6]),
        (SubsetName::Positive, [8, 12, 4]),
        (SubsetName::Occupation, [10, 18, 4]),
    ];

    let mut report_bytes: Vec<Vec<u8>> = Vec::new();
    for run in 0..2 {
        let gateway = Gateway::new().with_cache(TranslationCache::open(&cache_path).unwrap());
        let outcome = gateway.translate_batch(&corpus, &backend).unwrap();
        check(
            &format!("run {run} coverage"),
            outcome.records.len() == 80 && outcome.failures.is_empty(),
            format!(
                "{} records, {} failures",
                outcome.records.len(),
                outcome.failures.len()
            ),
        );
        let cached = outcome.records.iter().filter(|r| r.from_cache).count();
        check(
            &format!("run {run} cache usage"),
            cached == if run == 0 { 0 } else { 80 },
            format!("{cached} records from cache"),
        );

        let lists = GenderWordlists::default_lists();
        let mut labels: HashMap<String, Gender> = HashMap::new();
        for record in &outcome.records {
            let label = classify(&record.output_english, &lists).unwrap();
            labels.insert(record.sentence_id.clone(), label.value);
        }
        let scores = score_by_subsets(&corpus, &labels).unwrap();
        for (entry, (name, want)) in scores.iter().zip(expected_counts) {
            check(
                &format!("run {run} subset {name} counts"),
                entry.name == name && entry.portions.counts() == Some(want),
                format!(
                    "{:?} (want {:?} as [female, male, neutral])",
                    entry.portions.counts(),
                    want
                ),
            );
        }
        let report =
            EvaluationReport::new(&backend.backend_id, scores, outcome.coverage()).unwrap();
        let report_path = dir.path().join(format!("report-{run}.json"));
        write_report_json(&report_path, &report.to_file()).unwrap();
        report_bytes.push(std::fs::read(&report_path).unwrap());
    }
    check(
        "re-score byte stability",
        report_bytes[0] == report_bytes[1],
        format!(
            "{} vs {} bytes",
            report_bytes[0].len(),
            report_bytes[1].len()
        ),
    );
    verdict(4, "fixture replay and cache stability", passed, &details);
}

#[test]
fn acceptance_5_classifier_fixture_and_swap_symmetry() {
    let table =
        std::fs::read_to_string(workspace_path("data/fixtures/classifier-fixture.tsv")).unwrap();
    let lists = GenderWordlists::default_lists();
    let swapped = lists.swapped();
    let mut details = Vec::new();
    let mut passed = true;
    let mut rows = 0;
    let mut correct = 0;
    for line in table.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let (text, expected) = line.split_once('\t').expect("two-column fixture row");
        let want = match expected {
            "female" => Gender::Female,
            "male" => Gender::Male,
            "neutral" => Gender::Neutral,
            other => panic!("unknown expected label {other}"),
        };
        rows += 1;
        let got = classify(text, &lists).unwrap().value;
        if got == want {
            correct += 1;
        } else {
            passed = false;
            details.push(format!("{text:?}: got {got:?}, want {want:?}"));
        }
        let mirrored = classify(text, &swapped).unwrap().value;
        let expected_mirror = match got {
            Gender::Female => Gender::Male,
            Gender::Male => Gender::Female,
            Gender::Neutral => Gender::Neutral,
        };
        if mirrored != expected_mirror {
            passed = false;
            details.push(format!(
                "{text:?}: swap asymmetry ({got:?} vs {mirrored:?})"
            ));
        }
    }
    if rows != 30 {
        passed = false;
    }
    details.push(format!("{correct}/{rows} fixture rows match (want 30/30)"));
    verdict(5, "classifier fixture and swap symmetry", passed, &details);
}

#[test]
fn acceptance_6_simlab_end_to_end() {
    let started = Instant::now();
    let corpus = EecCorpus::generate(&demo_lexicon()).unwrap();
    let mut details = Vec::new();
    let mut passed = true;
    let mut check = |label: &str, ok: bool, detail: String| {
        if !ok {
            passed = false;
        }
        details.push(format!("{label}: {detail}"));
    };

    let neutral = SyntheticPolicy::FixedPortions {
        target: TargetPortions::new(0.0, 0.0, 1.0),
        seed: 7,
    };
    let outcome = run_subset_demo(&corpus, &neutral).unwrap();
    check(
        "all-neutral tgbi",
        outcome.tgbi == 1.0,
        format!("{} (want exactly 1.0)", outcome.tgbi),
    );

    let mut targets = std::collections::BTreeMap::new();
    targets.insert(
        tgbi_core::eec::ContentClass::Positive,
        TargetPortions::new(1.0, 0.0, 0.0),
    );
    targets.insert(
        tgbi_core::eec::ContentClass::Negative,
        TargetPortions::new(0.0, 1.0, 0.0),
    );
    targets.insert(
        tgbi_core::eec::ContentClass::Occupation,
        TargetPortions::new(0.0, 0.0, 1.0),
    );
    let biased = SyntheticPolicy::PerSubsetPortions { targets, seed: 7 };
    let outcome = run_subset_demo(&corpus, &biased).unwrap();
    let by_name: HashMap<SubsetName, &SubsetScore> =
        outcome.scores.iter().map(|s| (s.name, s)).collect();

    for name in [SubsetName::Positive, SubsetName::Negative] {
        let score = by_name[&name].score;
        check(
            &format!("biased {name} score"),
            score == 0.0,
            format!("{score} (want exactly 0.0)"),
        );
    }
    for name in [
        SubsetName::Informal,
        SubsetName::Formal,
        SubsetName::Impolite,
        SubsetName::Polite,
    ] {
        let entry = by_name[&name];
        check(
            &format!("biased {name} counts"),
            entry.portions.counts() == Some([12, 12, 16]),
            format!(
                "{:?} (counting oracle: [12, 12, 16])",
                entry.portions.counts()
            ),
        );
        check(
            &format!("biased {name} score"),
            entry.score == 0.7,
            format!(
                "{} (want sqrt(12*12 + 16*40)/40 = 28/40 = 0.7)",
                entry.score
            ),
        );
    }
    check(
        "biased occupation score",
        by_name[&SubsetName::Occupation].score == 1.0,
        format!(
            "{} (want exactly 1.0)",
            by_name[&SubsetName::Occupation].score
        ),
    );
    let expected_tgbi = 3.8 / 7.0;
    check(
        "biased tgbi",
        (outcome.tgbi - expected_tgbi).abs() <= 1e-12
            && (compute_tgbi(&outcome.scores).unwrap() - outcome.tgbi).abs() <= 1e-12,
        format!("{} (want 3.8/7 = {expected_tgbi})", outcome.tgbi),
    );

    let elapsed = started.elapsed();
    check(
        "runtime",
        elapsed < Duration::from_secs(5),
        format!("{elapsed:?} (limit 5s)"),
    );
    verdict(6, "simlab end to end", passed, &details);
}
