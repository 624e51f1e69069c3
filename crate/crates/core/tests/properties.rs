//! Randomized invariants: metric bounds and symmetry, corpus determinism,
//! and classifier behavior under list swaps and text perturbations.

use std::collections::HashMap;

use proptest::prelude::*;

use tgbi_core::classifier::{classify, Gender, GenderWordlists};
use tgbi_core::eec::EecCorpus;
use tgbi_core::lexicon::Polarity;
use tgbi_core::metrics::{portions_from_labels, subset_score, PortionTriple};
use tgbi_core::simlab::synthetic_lexicon;

fn arb_counts() -> impl Strategy<Value = (u64, u64, u64)> {
    (0u64..400, 0u64..400, 0u64..400).prop_filter("nonempty subset", |(f, m, n)| f + m + n > 0)
}

proptest! {
    #[test]
    fn score_from_any_counts_is_bounded((f, m, n) in arb_counts()) {
        let portions = PortionTriple::from_counts(f, m, n).unwrap();
        let score = subset_score(&portions).unwrap();
        prop_assert!((0.0..=1.0).contains(&score), "score {score} from ({f},{m},{n})");
    }

    #[test]
    fn score_is_symmetric_under_gender_swap((f, m, n) in arb_counts()) {
        let forward = subset_score(&PortionTriple::from_counts(f, m, n).unwrap()).unwrap();
        let swapped = subset_score(&PortionTriple::from_counts(m, f, n).unwrap()).unwrap();
        prop_assert_eq!(forward, swapped);
    }

    #[test]
    fn balanced_split_never_loses_for_fixed_neutral(p_n in 0.0f64..1.0, skew in 0.0f64..1.0) {
        let rest = 1.0 - p_n;
        let p_w = rest * skew;
        let sampled = subset_score(&PortionTriple::from_fractions(p_w, rest - p_w, p_n, 100).unwrap()).unwrap();
        let balanced = subset_score(&PortionTriple::from_fractions(rest / 2.0, rest / 2.0, p_n, 100).unwrap()).unwrap();
        prop_assert!(sampled <= balanced + 1e-12, "sampled {sampled} beats balanced {balanced}");
    }

    #[test]
    fn labels_count_into_exact_portions(labels in proptest::collection::vec(
        prop_oneof![Just(Gender::Female), Just(Gender::Male), Just(Gender::Neutral)],
        1..200,
    )) {
        let portions = portions_from_labels(&labels).unwrap();
        let female = labels.iter().filter(|g| **g == Gender::Female).count() as u64;
        let male = labels.iter().filter(|g| **g == Gender::Male).count() as u64;
        let neutral = labels.iter().filter(|g| **g == Gender::Neutral).count() as u64;
        prop_assert_eq!(portions.counts(), Some([female, male, neutral]));
        prop_assert_eq!(portions.n(), labels.len() as u64);
        prop_assert!((portions.p_w() + portions.p_m() + portions.p_n() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn corpus_generation_is_deterministic_and_partition_exact(
        n_pos in 1usize..6,
        n_neg in 1usize..6,
        n_occ in 1usize..6,
    ) {
        let lexicon = synthetic_lexicon(n_pos, n_neg, n_occ);
        let first = EecCorpus::generate(&lexicon).unwrap();
        let second = EecCorpus::generate(&lexicon).unwrap();
        prop_assert_eq!(first.sentences(), second.sentences());
        prop_assert_eq!(first.len(), 4 * lexicon.len());
        let total: usize = first.subset_index().values().map(Vec::len).sum();
        prop_assert_eq!(total, 3 * first.len());
    }

    #[test]
    fn classification_ignores_case(words in proptest::collection::vec("[a-zA-Z']{1,12}", 1..8)) {
        let text = words.join(" ");
        let lists = GenderWordlists::default_lists();
        let lower = classify(&text, &lists).unwrap();
        let upper = classify(&text.to_uppercase(), &lists).unwrap();
        prop_assert_eq!(lower.value, upper.value, "text: {}", text);
    }

    #[test]
    fn swapping_wordlists_mirrors_the_label(words in proptest::collection::vec("[a-zA-Z']{1,12}", 1..8)) {
        let text = words.join(" ");
        let lists = GenderWordlists::default_lists();
        let swapped = lists.swapped();
        let original = classify(&text, &lists).unwrap().value;
        let mirrored = classify(&text, &swapped).unwrap().value;
        let expected = match original {
            Gender::Female => Gender::Male,
            Gender::Male => Gender::Female,
            Gender::Neutral => Gender::Neutral,
        };
        prop_assert_eq!(mirrored, expected, "text: {}", text);
    }

    #[test]
    fn appending_neutral_words_never_flips_a_label(words in proptest::collection::vec("[a-z]{1,10}", 1..6)) {
        let text = words.join(" ");
        let lists = GenderWordlists::default_lists();
        let base = classify(&text, &lists).unwrap().value;
        let extended = classify(&format!("{text} about the person"), &lists).unwrap().value;
        prop_assert_eq!(base, extended, "text: {}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn whole_corpus_counts_equal_summed_partition_counts(
        n_pos in 1usize..5,
        n_neg in 1usize..5,
        n_occ in 1usize..5,
        seed in 0u64..1000,
    ) {
        use tgbi_core::simlab::{synth_translate, SyntheticPolicy, TargetPortions};
        let lexicon = synthetic_lexicon(n_pos, n_neg, n_occ);
        let corpus = EecCorpus::generate(&lexicon).unwrap();
        let policy = SyntheticPolicy::FixedPortions {
            target: TargetPortions::new(0.4, 0.4, 0.2),
            seed,
        };
        let lists = GenderWordlists::default_lists();
        let mut labels: HashMap<String, Gender> = HashMap::new();
        for sentence in corpus.sentences() {
            let output = synth_translate(sentence, &policy).unwrap();
            labels.insert(sentence.sentence_id.clone(), classify(&output, &lists).unwrap().value);
        }
        let whole = count_genders(labels.values());
        for partition in [
            vec![tgbi_core::eec::SubsetName::Informal, tgbi_core::eec::SubsetName::Formal],
            vec![tgbi_core::eec::SubsetName::Impolite, tgbi_core::eec::SubsetName::Polite],
            vec![
                tgbi_core::eec::SubsetName::Negative,
                tgbi_core::eec::SubsetName::Positive,
                tgbi_core::eec::SubsetName::Occupation,
            ],
        ] {
            let mut summed = [0u64; 3];
            for name in &partition {
                let counts = count_genders(
                    corpus.subset_ids(*name).iter().map(|id| &labels[id]),
                );
                for (total, part) in summed.iter_mut().zip(counts) {
                    *total += part;
                }
            }
            prop_assert_eq!(summed, whole, "partition {:?}", partition);
        }
    }
}

fn count_genders<'a>(labels: impl Iterator<Item = &'a Gender>) -> [u64; 3] {
    let mut counts = [0u64; 3];
    for label in labels {
        match label {
            Gender::Female => counts[0] += 1,
            Gender::Male => counts[1] += 1,
            Gender::Neutral => counts[2] += 1,
        }
    }
    counts
}

#[test]
fn lexicon_counts_cover_every_entry() {
    let lexicon = synthetic_lexicon(3, 4, 5);
    let counts = lexicon.counts();
    let total: usize = counts.values().sum();
    assert_eq!(total, lexicon.len());
    assert_eq!(counts[&Polarity::Positive], 3);
    assert_eq!(counts[&Polarity::Negative], 4);
    assert_eq!(counts[&Polarity::Neutral], 5);
}
