//! Weakly supervised training-data harvesting.
//!
//! Seed rules are conjunctions of hashtags and keywords associated with a
//! stance toward a topic. Tweets matching rules of exactly one stance get
//! that stance as a weak label; quality filters then drop near-duplicates
//! and tweets with too little dictionary vocabulary, and class balancing
//! assembles an equal-sized FAVOR/AGAINST/NONE training corpus.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{StanceLabel, Source, Tweet};
use crate::error::{Error, Result};
use crate::normalize::{squeeze_repeats, tokenize, Dictionary, TokenClass};

/// One conjunctive seed rule: every term must occur for the rule to match.
///
/// Terms starting with `#` match hashtag tokens exactly; bare terms match a
/// word token or the body of a hashtag. Matching is case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedRule {
    pub topic: String,
    pub stance: StanceLabel,
    pub terms: Vec<String>,
}

impl SeedRule {
    pub fn new(
        topic: impl Into<String>,
        stance: StanceLabel,
        terms: impl IntoIterator<Item = impl AsRef<str>>,
    ) -> Result<Self> {
        let topic = topic.into();
        if topic.is_empty() {
            return Err(Error::param("seed rule", "empty topic"));
        }
        if stance == StanceLabel::None {
            return Err(Error::param(
                "seed rule",
                "rules label FAVOR or AGAINST, never NONE",
            ));
        }
        let terms: Vec<String> = terms
            .into_iter()
            .map(|t| t.as_ref().to_lowercase())
            .collect();
        if terms.is_empty() {
            return Err(Error::param("seed rule", "rule has no terms"));
        }
        for term in &terms {
            if term.is_empty() || term == "#" {
                return Err(Error::param("seed rule", "empty term"));
            }
            if term.chars().any(char::is_whitespace) {
                return Err(Error::param(
                    "seed rule",
                    format!("term {term:?} contains whitespace"),
                ));
            }
        }
        Ok(SeedRule { topic, stance, terms })
    }
}

/// All seed rules for a run; every topic mentioned must have at least one
/// FAVOR and one AGAINST rule.
#[derive(Debug, Clone, Default)]
pub struct SeedRuleSet {
    rules: Vec<SeedRule>,
}

impl SeedRuleSet {
    pub fn new(rules: Vec<SeedRule>) -> Result<Self> {
        let topics: HashSet<&str> = rules.iter().map(|r| r.topic.as_str()).collect();
        for topic in topics {
            for stance in [StanceLabel::Favor, StanceLabel::Against] {
                if !rules.iter().any(|r| r.topic == topic && r.stance == stance) {
                    return Err(Error::param(
                        "seed rules",
                        format!("topic {topic:?} has no {stance} rule"),
                    ));
                }
            }
        }
        Ok(SeedRuleSet { rules })
    }

    pub fn rules(&self) -> &[SeedRule] {
        &self.rules
    }

    pub fn for_topic<'a>(&'a self, topic: &'a str) -> impl Iterator<Item = &'a SeedRule> {
        self.rules.iter().filter(move |r| r.topic == topic)
    }
}

fn match_tokens(tokens: &[String], rule: &SeedRule) -> bool {
    rule.terms.iter().all(|term| {
        if term.starts_with('#') {
            tokens.iter().any(|t| t == term)
        } else {
            tokens
                .iter()
                .any(|t| t == term || t.strip_prefix('#') == Some(term.as_str()))
        }
    })
}

fn lowercase_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .map(|t| t.text.to_lowercase())
        .collect()
}

/// True when `rule` belongs to the tweet's topic and all its terms occur in
/// the tweet.
pub fn match_rule(tweet: &Tweet, rule: &SeedRule) -> bool {
    rule.topic == tweet.topic && match_tokens(&lowercase_tokens(&tweet.text), rule)
}

/// Partition of tweets produced by [`weak_label`].
#[derive(Debug, Clone, Default)]
pub struct WeakLabels {
    /// Tweets matched by rules of exactly one stance, with that stance.
    pub labeled: Vec<(Tweet, StanceLabel)>,
    /// Tweets matched by both FAVOR and AGAINST rules; excluded as noisy.
    pub dual: Vec<Tweet>,
    /// Tweets matched by no rule for their topic.
    pub unmatched: Vec<Tweet>,
}

/// Apply seed rules to tweets, keeping only single-stance matches.
///
/// Each tweet is tested against the rules of its own topic. Input order is
/// preserved within each partition.
pub fn weak_label(tweets: &[Tweet], rules: &SeedRuleSet) -> WeakLabels {
    let mut out = WeakLabels::default();
    for tweet in tweets {
        let tokens = lowercase_tokens(&tweet.text);
        let mut favor = false;
        let mut against = false;
        for rule in rules.for_topic(&tweet.topic) {
            if match_tokens(&tokens, rule) {
                match rule.stance {
                    StanceLabel::Favor => favor = true,
                    StanceLabel::Against => against = true,
                    StanceLabel::None => unreachable!("rules never label NONE"),
                }
            }
        }
        match (favor, against) {
            (true, true) => out.dual.push(tweet.clone()),
            (true, false) => out.labeled.push((tweet.clone(), StanceLabel::Favor)),
            (false, true) => out.labeled.push((tweet.clone(), StanceLabel::Against)),
            (false, false) => out.unmatched.push(tweet.clone()),
        }
    }
    out
}

fn token_set(text: &str) -> HashSet<String> {
    lowercase_tokens(text).into_iter().collect()
}

fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    intersection as f64 / union as f64
}

/// Threshold above which two token sets count as the same tweet.
pub const DUPLICATE_JACCARD: f64 = 0.8;

/// Drop near-duplicates in one greedy pass.
///
/// A tweet is kept unless its lowercased token set has Jaccard similarity of
/// at least [`DUPLICATE_JACCARD`] with an already-kept tweet. First
/// occurrence wins; output preserves input order, so the pass is idempotent.
pub fn filter_duplicates(tweets: Vec<Tweet>) -> Vec<Tweet> {
    let mut kept: Vec<Tweet> = Vec::new();
    let mut kept_sets: Vec<HashSet<String>> = Vec::new();
    for tweet in tweets {
        let set = token_set(&tweet.text);
        if kept_sets.iter().all(|k| jaccard(k, &set) < DUPLICATE_JACCARD) {
            kept.push(tweet);
            kept_sets.push(set);
        }
    }
    kept
}

/// Count word tokens (after run squeezing) found in the dictionary; each
/// occurrence counts.
fn dictionary_word_count(text: &str, dictionary: &Dictionary) -> usize {
    tokenize(text)
        .into_iter()
        .filter(|t| t.class == TokenClass::Word)
        .filter(|t| dictionary.contains(&squeeze_repeats(&t.text)))
        .count()
}

/// Minimum dictionary words a tweet needs to survive
/// [`filter_min_dictionary`].
pub const MIN_DICTIONARY_WORDS: usize = 4;

/// Drop tweets containing fewer than [`MIN_DICTIONARY_WORDS`] dictionary
/// words. An empty dictionary is an error rather than a silent drop-all.
pub fn filter_min_dictionary(tweets: Vec<Tweet>, dictionary: &Dictionary) -> Result<Vec<Tweet>> {
    if dictionary.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    Ok(tweets
        .into_iter()
        .filter(|t| dictionary_word_count(&t.text, dictionary) >= MIN_DICTIONARY_WORDS)
        .collect())
}

/// Bucket of the NONE pool a tweet may be drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoneSource {
    /// Pool tweets harvested for other topics.
    OtherTopics,
    /// Pool tweets sampled from an unrelated random stream.
    RandomPool,
}

impl NoneSource {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "other_topics" => Ok(NoneSource::OtherTopics),
            "random_pool" => Ok(NoneSource::RandomPool),
            other => Err(Error::param(
                "none_sources",
                format!("unknown source {other:?} (expected other_topics or random_pool)"),
            )),
        }
    }
}

/// Settings for [`balance_classes`].
#[derive(Debug, Clone)]
pub struct BalanceConfig {
    /// Topic being trained; pool tweets on this topic are never used as NONE.
    pub topic: String,
    /// Optional ceiling on the per-class size.
    pub per_class_cap: Option<usize>,
    /// Pool buckets to draw NONE examples from, in order of preference.
    pub none_sources: Vec<NoneSource>,
    /// Seed for the NONE sampling RNG.
    pub seed: u64,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        BalanceConfig {
            topic: String::new(),
            per_class_cap: None,
            none_sources: vec![NoneSource::OtherTopics, NoneSource::RandomPool],
            seed: 0,
        }
    }
}

/// Assemble an equal-sized three-class training corpus.
///
/// The per-class size is the smaller of the FAVOR and AGAINST counts, capped
/// by `per_class_cap`. FAVOR and AGAINST keep the first `n` tweets in input
/// order; NONE examples are sampled without replacement from the pool
/// buckets in `none_sources` order with a seeded RNG. The output carries the
/// assigned stance on every tweet, FAVOR block first, then AGAINST, then
/// NONE.
pub fn balance_classes(
    labeled: &[(Tweet, StanceLabel)],
    pool: &[Tweet],
    config: &BalanceConfig,
) -> Result<Vec<(Tweet, StanceLabel)>> {
    if let Some(0) = config.per_class_cap {
        return Err(Error::param("per_class_cap", "must be at least 1"));
    }
    let favor: Vec<&Tweet> = labeled
        .iter()
        .filter(|(_, s)| *s == StanceLabel::Favor)
        .map(|(t, _)| t)
        .collect();
    let against: Vec<&Tweet> = labeled
        .iter()
        .filter(|(_, s)| *s == StanceLabel::Against)
        .map(|(t, _)| t)
        .collect();
    let mut n = favor.len().min(against.len());
    if let Some(cap) = config.per_class_cap {
        n = n.min(cap);
    }
    if n == 0 {
        let (label, available) = if favor.is_empty() {
            (StanceLabel::Favor, favor.len())
        } else {
            (StanceLabel::Against, against.len())
        };
        return Err(Error::ClassDeficit {
            label: label.to_string(),
            needed: 1,
            available,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut none_examples: Vec<&Tweet> = Vec::with_capacity(n);
    let mut remaining = n;
    for source in &config.none_sources {
        if remaining == 0 {
            break;
        }
        let bucket: Vec<&Tweet> = pool
            .iter()
            .filter(|t| t.topic != config.topic)
            .filter(|t| match source {
                NoneSource::RandomPool => t.source == Source::RandomPool,
                NoneSource::OtherTopics => t.source != Source::RandomPool,
            })
            .collect();
        let take = remaining.min(bucket.len());
        if take > 0 {
            let mut picks = rand::seq::index::sample(&mut rng, bucket.len(), take).into_vec();
            picks.sort_unstable();
            none_examples.extend(picks.into_iter().map(|i| bucket[i]));
            remaining -= take;
        }
    }
    if remaining > 0 {
        return Err(Error::ClassDeficit {
            label: StanceLabel::None.to_string(),
            needed: n,
            available: n - remaining,
        });
    }

    let relabel = |tweet: &Tweet, stance: StanceLabel| {
        let mut t = tweet.clone();
        t.stance = Some(stance);
        (t, stance)
    };
    let mut out = Vec::with_capacity(3 * n);
    out.extend(favor.iter().take(n).map(|t| relabel(t, StanceLabel::Favor)));
    out.extend(against.iter().take(n).map(|t| relabel(t, StanceLabel::Against)));
    out.extend(none_examples.iter().map(|t| relabel(t, StanceLabel::None)));
    Ok(out)
}

/// Per-rule match statistics for the harvest report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleReport {
    pub topic: String,
    pub stance: StanceLabel,
    pub terms: Vec<String>,
    pub matches: usize,
    /// Up to `max_examples` matching tweet ids, in input order.
    pub examples: Vec<String>,
}

/// Count matches per rule over `tweets`, keeping a few example ids each.
pub fn rule_report(tweets: &[Tweet], rules: &SeedRuleSet, max_examples: usize) -> Vec<RuleReport> {
    let tokenized: Vec<(&Tweet, Vec<String>)> = tweets
        .iter()
        .map(|t| (t, lowercase_tokens(&t.text)))
        .collect();
    rules
        .rules()
        .iter()
        .map(|rule| {
            let mut matches = 0;
            let mut examples = Vec::new();
            for (tweet, tokens) in &tokenized {
                if tweet.topic == rule.topic && match_tokens(tokens, rule) {
                    matches += 1;
                    if examples.len() < max_examples {
                        examples.push(tweet.id.clone());
                    }
                }
            }
            RuleReport {
                topic: rule.topic.clone(),
                stance: rule.stance,
                terms: rule.terms.clone(),
                matches,
                examples,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet(id: &str, topic: &str, text: &str) -> Tweet {
        Tweet {
            id: id.to_string(),
            text: text.to_string(),
            topic: topic.to_string(),
            stance: None,
            source: Source::Harvested,
        }
    }

    fn pool_tweet(id: &str, topic: &str, text: &str, source: Source) -> Tweet {
        Tweet {
            source,
            ..tweet(id, topic, text)
        }
    }

    fn climate_rules() -> SeedRuleSet {
        SeedRuleSet::new(vec![
            SeedRule::new("climate", StanceLabel::Against, ["#hoax", "climate"]).unwrap(),
            SeedRule::new("climate", StanceLabel::Favor, ["#climatechange"]).unwrap(),
            SeedRule::new("climate", StanceLabel::Favor, ["#savetheplanet"]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn rules_require_both_stances_per_topic() {
        let one_sided = SeedRuleSet::new(vec![
            SeedRule::new("climate", StanceLabel::Favor, ["#climatechange"]).unwrap()
        ]);
        assert!(one_sided.is_err());
        assert!(SeedRule::new("climate", StanceLabel::None, ["#x"]).is_err());
        assert!(SeedRule::new("climate", StanceLabel::Favor, Vec::<&str>::new()).is_err());
        assert!(SeedRule::new("climate", StanceLabel::Favor, ["two words"]).is_err());
    }

    #[test]
    fn match_rule_requires_every_term() {
        let rules = climate_rules();
        let hoax_rule = &rules.rules()[0];
        assert!(match_rule(
            &tweet("a", "climate", "the climate is fine #hoax"),
            hoax_rule
        ));
        // Hashtag term missing: keyword alone is not enough.
        assert!(!match_rule(&tweet("b", "climate", "the climate is fine"), hoax_rule));
        // Keyword missing: hashtag alone is not enough.
        assert!(!match_rule(&tweet("c", "climate", "what a #hoax"), hoax_rule));
    }

    #[test]
    fn match_rule_is_case_insensitive_and_exact_on_hashtags() {
        let rules = climate_rules();
        let hoax_rule = &rules.rules()[0];
        assert!(match_rule(
            &tweet("a", "climate", "CLIMATE talk? #HOAX"),
            hoax_rule
        ));
        // "#hoaxes" is a different hashtag.
        assert!(!match_rule(
            &tweet("b", "climate", "climate #hoaxes everywhere"),
            hoax_rule
        ));
        // A bare keyword may be satisfied by a hashtag body...
        assert!(match_rule(
            &tweet("c", "climate", "#climate talk is a #hoax"),
            hoax_rule
        ));
        // ...but a hashtag term is never satisfied by a bare word.
        assert!(!match_rule(&tweet("d", "climate", "climate hoax"), hoax_rule));
    }

    #[test]
    fn match_rule_respects_topic() {
        let rules = climate_rules();
        let hoax_rule = &rules.rules()[0];
        assert!(!match_rule(
            &tweet("a", "abortion", "climate of debate #hoax"),
            hoax_rule
        ));
    }

    #[test]
    fn weak_label_partitions_and_excludes_dual_matches() {
        let rules = climate_rules();
        let tweets = vec![
            tweet("f1", "climate", "act now #climatechange"),
            tweet("a1", "climate", "climate science is a #hoax"),
            tweet("d1", "climate", "climate #hoax or #climatechange who knows"),
            tweet("u1", "climate", "nice weather today"),
            tweet("x1", "abortion", "act now #climatechange"),
        ];
        let out = weak_label(&tweets, &rules);
        let labels: Vec<(&str, StanceLabel)> = out
            .labeled
            .iter()
            .map(|(t, s)| (t.id.as_str(), *s))
            .collect();
        assert_eq!(
            labels,
            vec![("f1", StanceLabel::Favor), ("a1", StanceLabel::Against)]
        );
        assert_eq!(out.dual.len(), 1);
        assert_eq!(out.dual[0].id, "d1");
        // x1 has no rules for its topic, u1 matches nothing.
        let unmatched: Vec<&str> = out.unmatched.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(unmatched, vec!["u1", "x1"]);
    }

    #[test]
    fn filter_duplicates_drops_near_copies_greedily() {
        let tweets = vec![
            tweet("t1", "climate", "no snow in winter means nothing"),
            // Retweet prefix: token set overlap 6/7 > 0.8.
            tweet("t2", "climate", "rt no snow in winter means nothing"),
            tweet("t3", "climate", "completely different words here okay yes"),
            // Exact duplicate of t1.
            tweet("t4", "climate", "no snow in winter means nothing"),
        ];
        let kept = filter_duplicates(tweets);
        let ids: Vec<&str> = kept.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, vec!["t1", "t3"]);
    }

    #[test]
    fn filter_duplicates_uses_the_threshold_not_equality() {
        // 4 shared of 7 distinct tokens: Jaccard 4/7 < 0.8, both kept.
        let below = vec![
            tweet("a", "t", "one two three four five"),
            tweet("b", "t", "one two three four six seven"),
        ];
        assert_eq!(filter_duplicates(below).len(), 2);
        // 4 of 4 vs 5 tokens: Jaccard 4/5 = 0.8, second dropped.
        let at = vec![
            tweet("a", "t", "one two three four five"),
            tweet("b", "t", "one two three four"),
        ];
        assert_eq!(filter_duplicates(at).len(), 1);
    }

    #[test]
    fn filter_duplicates_is_idempotent_and_drops_empty_copies() {
        let tweets = vec![
            tweet("a", "t", ""),
            tweet("b", "t", ""),
            tweet("c", "t", "words here"),
        ];
        let kept = filter_duplicates(tweets);
        let ids: Vec<&str> = kept.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "c"]);
        let again = filter_duplicates(kept.clone());
        assert_eq!(again, kept);
    }

    #[test]
    fn min_dictionary_filter_counts_occurrences_of_word_tokens() {
        let dict = Dictionary::from_words(["snow", "cold", "very", "cool"]);
        let tweets = vec![
            // 4 dictionary words (very counts twice).
            tweet("keep", "t", "very very cold snow #blizzard"),
            // 3 dictionary words.
            tweet("drop", "t", "very cold snow #blizzard"),
            // Hashtags, mentions, urls, numbers never count.
            tweet("tags", "t", "#snow #cold @very http://cool.example 4"),
            // Squeezed form is what gets looked up.
            tweet("squeeze", "t", "sooo coool very cold snow"),
        ];
        let kept = filter_min_dictionary(tweets, &dict).unwrap();
        let ids: Vec<&str> = kept.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, vec!["keep", "squeeze"]);
    }

    #[test]
    fn min_dictionary_filter_rejects_empty_dictionary() {
        let result = filter_min_dictionary(vec![tweet("a", "t", "x")], &Dictionary::default());
        assert!(matches!(result, Err(Error::EmptyDictionary)));
    }

    fn balance_fixture() -> (Vec<(Tweet, StanceLabel)>, Vec<Tweet>) {
        let labeled = vec![
            (tweet("f1", "climate", "x"), StanceLabel::Favor),
            (tweet("a1", "climate", "x"), StanceLabel::Against),
            (tweet("f2", "climate", "x"), StanceLabel::Favor),
            (tweet("f3", "climate", "x"), StanceLabel::Favor),
            (tweet("a2", "climate", "x"), StanceLabel::Against),
        ];
        let pool = vec![
            pool_tweet("o1", "abortion", "x", Source::Harvested),
            pool_tweet("o2", "feminism", "x", Source::Harvested),
            pool_tweet("o3", "atheism", "x", Source::Official),
            pool_tweet("r1", "random", "x", Source::RandomPool),
            pool_tweet("r2", "random", "x", Source::RandomPool),
            // Same topic as the run: never eligible for NONE.
            pool_tweet("c1", "climate", "x", Source::RandomPool),
        ];
        (labeled, pool)
    }

    #[test]
    fn balance_takes_min_class_size_in_input_order() {
        let (labeled, pool) = balance_fixture();
        let config = BalanceConfig {
            topic: "climate".into(),
            ..BalanceConfig::default()
        };
        let out = balance_classes(&labeled, &pool, &config).unwrap();
        assert_eq!(out.len(), 6);
        let favor: Vec<&str> = out
            .iter()
            .filter(|(_, s)| *s == StanceLabel::Favor)
            .map(|(t, _)| t.id.as_str())
            .collect();
        assert_eq!(favor, vec!["f1", "f2"], "first n in input order");
        for (t, s) in &out {
            assert_eq!(t.stance, Some(*s), "assigned stance is written back");
            if *s == StanceLabel::None {
                assert_ne!(t.topic, "climate");
                assert_ne!(t.id, "c1");
            }
        }
        // Default source order prefers other-topic tweets over random pool.
        let none_ids: Vec<&str> = out
            .iter()
            .filter(|(_, s)| *s == StanceLabel::None)
            .map(|(t, _)| t.id.as_str())
            .collect();
        assert!(none_ids.iter().all(|id| id.starts_with('o')), "{none_ids:?}");
    }

    #[test]
    fn balance_is_deterministic_per_seed() {
        let (labeled, pool) = balance_fixture();
        let config = BalanceConfig {
            topic: "climate".into(),
            seed: 42,
            ..BalanceConfig::default()
        };
        let a = balance_classes(&labeled, &pool, &config).unwrap();
        let b = balance_classes(&labeled, &pool, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn balance_respects_cap_and_source_order() {
        let (labeled, pool) = balance_fixture();
        let config = BalanceConfig {
            topic: "climate".into(),
            per_class_cap: Some(1),
            none_sources: vec![NoneSource::RandomPool],
            ..BalanceConfig::default()
        };
        let out = balance_classes(&labeled, &pool, &config).unwrap();
        assert_eq!(out.len(), 3);
        let none_ids: Vec<&str> = out
            .iter()
            .filter(|(_, s)| *s == StanceLabel::None)
            .map(|(t, _)| t.id.as_str())
            .collect();
        assert!(none_ids[0].starts_with('r'), "{none_ids:?}");
    }

    #[test]
    fn balance_spills_into_later_sources_and_reports_deficits() {
        let (labeled, _) = balance_fixture();
        // Only one other-topic tweet: the second NONE must come from the
        // random pool.
        let pool = vec![
            pool_tweet("o1", "abortion", "x", Source::Harvested),
            pool_tweet("r1", "random", "x", Source::RandomPool),
        ];
        let config = BalanceConfig {
            topic: "climate".into(),
            ..BalanceConfig::default()
        };
        let out = balance_classes(&labeled, &pool, &config).unwrap();
        let mut none_ids: Vec<&str> = out
            .iter()
            .filter(|(_, s)| *s == StanceLabel::None)
            .map(|(t, _)| t.id.as_str())
            .collect();
        none_ids.sort_unstable();
        assert_eq!(none_ids, vec!["o1", "r1"]);

        // Pool too small: deficit error.
        let tiny = vec![pool_tweet("o1", "abortion", "x", Source::Harvested)];
        let err = balance_classes(&labeled, &tiny, &config).unwrap_err();
        assert!(matches!(err, Error::ClassDeficit { .. }), "{err}");
    }

    #[test]
    fn balance_errors_when_a_stance_class_is_empty() {
        let labeled = vec![(tweet("f1", "climate", "x"), StanceLabel::Favor)];
        let config = BalanceConfig {
            topic: "climate".into(),
            ..BalanceConfig::default()
        };
        let err = balance_classes(&labeled, &[], &config).unwrap_err();
        assert!(matches!(err, Error::ClassDeficit { .. }));
    }

    #[test]
    fn rule_report_counts_matches_per_rule() {
        let rules = climate_rules();
        let tweets = vec![
            tweet("a", "climate", "climate #hoax"),
            tweet("b", "climate", "more climate #hoax talk"),
            tweet("c", "climate", "go green #savetheplanet"),
            tweet("d", "abortion", "climate #hoax"),
        ];
        let report = rule_report(&tweets, &rules, 1);
        assert_eq!(report.len(), 3);
        assert_eq!(report[0].matches, 2);
        assert_eq!(report[0].examples, vec!["a"]);
        assert_eq!(report[1].matches, 0);
        assert_eq!(report[2].matches, 1);
    }
}
