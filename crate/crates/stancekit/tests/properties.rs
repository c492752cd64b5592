//! Randomized invariants over the text-processing and metric primitives.

use proptest::prelude::*;

use stancekit::corpus::StanceLabel;
use stancekit::eval::evaluate;
use stancekit::normalize::{squeeze_repeats, strip_hashtags, tokenize};

/// Longest run of identical characters in a string.
fn longest_run(s: &str) -> usize {
    let mut best = 0usize;
    let mut current = 0usize;
    let mut last: Option<char> = None;
    for c in s.chars() {
        current = if last == Some(c) { current + 1 } else { 1 };
        best = best.max(current);
        last = Some(c);
    }
    best
}

proptest! {
    #[test]
    fn squeeze_leaves_no_run_longer_than_two(s in "\\PC{0,40}") {
        let squeezed = squeeze_repeats(&s);
        prop_assert!(longest_run(&squeezed) <= 2, "{squeezed:?}");
    }

    #[test]
    fn squeeze_is_idempotent(s in "\\PC{0,40}") {
        let once = squeeze_repeats(&s);
        prop_assert_eq!(squeeze_repeats(&once), once.clone());
    }

    #[test]
    fn squeeze_preserves_short_runs(s in "([a-z]|[a-z][a-z])([0-9]|[0-9][0-9])") {
        // Strings built only from runs of length <= 2 come back unchanged.
        prop_assert_eq!(squeeze_repeats(&s), s);
    }

    #[test]
    fn tokenize_emits_no_empty_or_spaced_tokens(s in "\\PC{0,60}") {
        for token in tokenize(&s) {
            prop_assert!(!token.text.is_empty());
            prop_assert!(!token.text.chars().any(char::is_whitespace), "{:?}", token.text);
        }
    }

    #[test]
    fn tokenize_chunks_reassemble(s in "[a-z#@!?.,:%0-9 ]{0,60}") {
        // Concatenating the tokens of each whitespace chunk reproduces it.
        let rebuilt: String = tokenize(&s).iter().map(|t| t.text.as_str()).collect();
        let original: String = s.split_whitespace().collect();
        prop_assert_eq!(rebuilt, original);
    }

    #[test]
    fn metrics_stay_in_unit_interval(
        gold in proptest::collection::vec(0usize..3, 1..40),
        pred_seed in proptest::collection::vec(0usize..3, 1..40),
    ) {
        let n = gold.len().min(pred_seed.len());
        let to_label = |i: usize| StanceLabel::ALL[i];
        let gold: Vec<StanceLabel> = gold[..n].iter().copied().map(to_label).collect();
        let pred: Vec<StanceLabel> = pred_seed[..n].iter().copied().map(to_label).collect();
        let report = evaluate(&gold, &pred).unwrap();
        let mut total = 0usize;
        for row in report.confusion {
            for cell in row {
                total += cell;
            }
        }
        prop_assert_eq!(total, n, "every pair lands in exactly one confusion cell");
        for label in StanceLabel::ALL {
            let m = &report.per_class[&label];
            for v in [m.precision, m.recall, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
        let favor = report.f1(StanceLabel::Favor);
        let against = report.f1(StanceLabel::Against);
        prop_assert!((report.semeval_avg - (favor + against) / 2.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strip_hashtags_is_idempotent_on_fallback_parses(
        words in proptest::collection::vec("[a-z]{1,8}|#[a-z]{1,8}", 1..12),
    ) {
        use stancekit::corpus::{ParsedTweet, Tweet};
        use stancekit::normalize::{Dictionary, NormalizationLexicon, Normalizer};
        let normalizer = Normalizer::new(Dictionary::default(), NormalizationLexicon::default());
        let text = words.join(" ");
        let (tokens, arcs) = normalizer.fallback_parse(&text);
        let parsed = ParsedTweet {
            tweet: Tweet {
                id: "p".into(),
                text,
                topic: "t".into(),
                stance: None,
                source: Default::default(),
            },
            tokens,
            arcs,
            fallback: true,
        };
        let once = strip_hashtags(&parsed);
        let twice = strip_hashtags(&once);
        prop_assert_eq!(&once.tokens, &twice.tokens);
        prop_assert_eq!(&once.arcs, &twice.arcs);
        // Token indices are 1..=n after reindexing.
        for (i, token) in once.tokens.iter().enumerate() {
            prop_assert_eq!(token.index, i + 1);
        }
    }
}
