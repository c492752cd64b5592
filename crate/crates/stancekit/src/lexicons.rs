//! Sentiment and category lexicons.
//!
//! Three lexicon shapes feed feature extraction: a category lexicon mapping
//! words (or `prefix*` patterns) to category sets, a scored lexicon mapping
//! words to integer valences, and a polarity lexicon of positive/negative
//! word lists. The two sentiment lexicons combine into a single score in
//! -2..=2, optionally inverted by nearby negation words.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::Token;
use crate::error::{Error, Result};

/// Category name used for negation words in the category lexicon.
pub const NEGATE_CATEGORY: &str = "negate";

/// Maps words and word prefixes to sets of category names.
#[derive(Debug, Clone, Default)]
pub struct CategoryLexicon {
    categories: BTreeSet<String>,
    exact: HashMap<String, BTreeSet<String>>,
    /// Prefix entries, longest prefix first so the first match wins.
    prefixes: Vec<(String, BTreeSet<String>)>,
}

impl CategoryLexicon {
    /// Build a lexicon from `(pattern, categories)` pairs. A trailing `*`
    /// marks a prefix pattern. Patterns are matched case-insensitively.
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut lexicon = CategoryLexicon::default();
        for (pattern, cats) in entries {
            let cats: BTreeSet<String> =
                cats.iter().map(|c| c.as_ref().to_lowercase()).collect();
            lexicon.categories.extend(cats.iter().cloned());
            lexicon.insert(pattern.as_ref(), cats)?;
        }
        lexicon.sort_prefixes();
        Ok(lexicon)
    }

    fn insert(&mut self, pattern: &str, cats: BTreeSet<String>) -> Result<()> {
        let pattern = pattern.to_lowercase();
        if pattern.is_empty() || pattern == "*" {
            return Err(Error::param("category lexicon", "empty pattern"));
        }
        if cats.is_empty() {
            return Err(Error::param(
                "category lexicon",
                format!("pattern {pattern:?} has no categories"),
            ));
        }
        if let Some(prefix) = pattern.strip_suffix('*') {
            self.prefixes.push((prefix.to_string(), cats));
        } else {
            self.exact.entry(pattern).or_default().extend(cats);
        }
        Ok(())
    }

    fn sort_prefixes(&mut self) {
        // Longest first; ties broken lexicographically for determinism.
        self.prefixes
            .sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    }

    /// Load the TSV format: a header line of comma-separated category names,
    /// then `pattern<TAB>cat1,cat2` entries. Entries must only use header
    /// categories.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lexicon = CategoryLexicon::default();
        let mut header: Option<BTreeSet<String>> = None;
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let Some(declared) = header.as_ref() else {
                let declared: BTreeSet<String> = trimmed
                    .split(',')
                    .map(|c| c.trim().to_lowercase())
                    .filter(|c| !c.is_empty())
                    .collect();
                if declared.is_empty() {
                    return Err(Error::malformed(path, idx + 1, "empty category header"));
                }
                lexicon.categories = declared.clone();
                header = Some(declared);
                continue;
            };
            let (pattern, cats) = trimmed
                .split_once('\t')
                .ok_or_else(|| Error::malformed(path, idx + 1, "expected pattern<TAB>categories"))?;
            let cats: BTreeSet<String> = cats
                .split(',')
                .map(|c| c.trim().to_lowercase())
                .filter(|c| !c.is_empty())
                .collect();
            for cat in &cats {
                if !declared.contains(cat) {
                    return Err(Error::malformed(
                        path,
                        idx + 1,
                        format!("category {cat:?} not declared in header"),
                    ));
                }
            }
            lexicon
                .insert(pattern.trim(), cats)
                .map_err(|e| Error::malformed(path, idx + 1, e.to_string()))?;
        }
        if header.is_none() {
            return Err(Error::malformed(path, 1, "missing category header"));
        }
        lexicon.sort_prefixes();
        Ok(lexicon)
    }

    /// All categories of `word`: the union of the exact entry and the
    /// longest matching prefix entry.
    pub fn lookup(&self, word: &str) -> BTreeSet<String> {
        let word = word.to_lowercase();
        let mut cats = self.exact.get(&word).cloned().unwrap_or_default();
        if let Some((_, prefix_cats)) = self
            .prefixes
            .iter()
            .find(|(prefix, _)| word.starts_with(prefix.as_str()))
        {
            cats.extend(prefix_cats.iter().cloned());
        }
        cats
    }

    /// True when `word` carries `category`.
    pub fn has_category(&self, word: &str, category: &str) -> bool {
        self.lookup(word).contains(category)
    }

    /// True when `word` is a negation per the `negate` category.
    pub fn is_negation(&self, word: &str) -> bool {
        self.has_category(word, NEGATE_CATEGORY)
    }

    /// Declared category names.
    pub fn categories(&self) -> &BTreeSet<String> {
        &self.categories
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty() && self.prefixes.is_empty()
    }
}

/// Integer word valences in -5..=5, zero meaning neutral.
#[derive(Debug, Clone, Default)]
pub struct ScoredLexicon {
    scores: HashMap<String, i8>,
}

impl ScoredLexicon {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, i8)>,
        S: AsRef<str>,
    {
        ScoredLexicon {
            scores: pairs
                .into_iter()
                .map(|(w, s)| (w.as_ref().to_lowercase(), s))
                .collect(),
        }
    }

    /// Load a TSV of `word<TAB>score` with scores in -5..=5.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut scores = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (word, score) = trimmed
                .split_once('\t')
                .ok_or_else(|| Error::malformed(path, idx + 1, "expected word<TAB>score"))?;
            let score: i8 = score.trim().parse().map_err(|_| {
                Error::malformed(path, idx + 1, format!("bad score {:?}", score.trim()))
            })?;
            if !(-5..=5).contains(&score) {
                return Err(Error::malformed(
                    path,
                    idx + 1,
                    format!("score {score} outside -5..=5"),
                ));
            }
            scores.insert(word.trim().to_lowercase(), score);
        }
        Ok(ScoredLexicon { scores })
    }

    /// Valence of `word`; absent words are neutral (0).
    pub fn score(&self, word: &str) -> i8 {
        self.scores.get(&word.to_lowercase()).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Positive and negative word lists; the two sets never overlap.
#[derive(Debug, Clone, Default)]
pub struct PolarityLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

impl PolarityLexicon {
    pub fn from_words<I, J, S>(positive: I, negative: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let positive: HashSet<String> = positive
            .into_iter()
            .map(|w| w.as_ref().to_lowercase())
            .collect();
        let negative: HashSet<String> = negative
            .into_iter()
            .map(|w| w.as_ref().to_lowercase())
            .collect();
        if let Some(both) = positive.intersection(&negative).next() {
            return Err(Error::param(
                "polarity lexicon",
                format!("word {both:?} is both positive and negative"),
            ));
        }
        Ok(PolarityLexicon { positive, negative })
    }

    /// Load from two word-list files, one word per line.
    pub fn load(positive: impl AsRef<Path>, negative: impl AsRef<Path>) -> Result<Self> {
        let pos = load_word_list(positive.as_ref())?;
        let neg = load_word_list(negative.as_ref())?;
        PolarityLexicon::from_words(pos, neg)
    }

    /// +1 for positive words, -1 for negative words, 0 otherwise.
    pub fn polarity(&self, word: &str) -> i8 {
        let word = word.to_lowercase();
        if self.positive.contains(&word) {
            1
        } else if self.negative.contains(&word) {
            -1
        } else {
            0
        }
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }
}

fn load_word_list(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut words = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let word = line.trim();
        if !word.is_empty() && !word.starts_with(';') {
            words.push(word.to_string());
        }
    }
    Ok(words)
}

/// Combine the scored and polarity lexicons into one signed strength in
/// -2..=2 for `word`.
///
/// Each lexicon casts a directional vote (the scored lexicon abstains at 0
/// or when the word is absent). Two agreeing votes give magnitude 2,
/// exactly one vote gives magnitude 1, contradicting votes or no votes give
/// 0.
pub fn combined_sentiment(word: &str, scored: &ScoredLexicon, polarity: &PolarityLexicon) -> i8 {
    let score_vote = scored.score(word).signum();
    let polarity_vote = polarity.polarity(word);
    match (score_vote, polarity_vote) {
        (0, p) => p,
        (s, 0) => s,
        (s, p) if s == p => 2 * s,
        _ => 0,
    }
}

/// Invert `score` when either of the two tokens before position `position`
/// (1-based) is a negation word per the category lexicon.
///
/// Negation is tested on the lowercased normalized forms. Applying the rule
/// twice restores the original score.
pub fn apply_negation(
    score: i8,
    position: usize,
    tokens: &[Token],
    categories: &CategoryLexicon,
) -> i8 {
    let negated = tokens
        .iter()
        .filter(|t| t.index + 1 == position || t.index + 2 == position)
        .any(|t| categories.is_negation(&t.normalized));
    if negated {
        -score
    } else {
        score
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn category_fixture() -> CategoryLexicon {
        CategoryLexicon::from_entries([
            ("not", vec!["negate"]),
            ("never", vec!["negate"]),
            ("good", vec!["posemo"]),
            ("rock*", vec!["posemo"]),
            ("rockslide", vec!["negemo"]),
            ("fail", vec!["negemo"]),
        ])
        .unwrap()
    }

    #[test]
    fn category_lookup_unions_exact_and_prefix() {
        let lex = category_fixture();
        assert!(lex.has_category("good", "posemo"));
        assert!(lex.has_category("GOOD", "posemo"));
        assert!(lex.has_category("rocks", "posemo"));
        assert!(lex.has_category("rocking", "posemo"));
        // Exact entry and prefix entry both apply.
        let slide = lex.lookup("rockslide");
        assert!(slide.contains("posemo") && slide.contains("negemo"));
        assert!(lex.lookup("stone").is_empty());
        assert!(lex.is_negation("not"));
        assert!(!lex.is_negation("good"));
    }

    #[test]
    fn longest_prefix_wins() {
        let lex = CategoryLexicon::from_entries([
            ("care*", vec!["posemo"]),
            ("careless*", vec!["negemo"]),
        ])
        .unwrap();
        let cats = lex.lookup("carelessness");
        assert!(cats.contains("negemo"));
        assert!(!cats.contains("posemo"));
        assert!(lex.lookup("cares").contains("posemo"));
    }

    #[test]
    fn category_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cats.tsv");
        std::fs::write(&path, "negate,posemo,negemo\nnot\tnegate\nrock*\tposemo\n").unwrap();
        let lex = CategoryLexicon::load(&path).unwrap();
        assert!(lex.is_negation("not"));
        assert!(lex.has_category("rocked", "posemo"));
        assert_eq!(
            lex.categories().iter().map(String::as_str).collect::<Vec<_>>(),
            vec!["negate", "negemo", "posemo"]
        );

        std::fs::write(&path, "negate\nnot\tposemo\n").unwrap();
        assert!(CategoryLexicon::load(&path).is_err(), "undeclared category");
        std::fs::write(&path, "").unwrap();
        assert!(CategoryLexicon::load(&path).is_err(), "missing header");
    }

    #[test]
    fn scored_lexicon_scores_and_bounds() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scored.tsv");
        std::fs::write(&path, "good\t3\nbad\t-3\nmeh\t0\n").unwrap();
        let lex = ScoredLexicon::load(&path).unwrap();
        assert_eq!(lex.score("good"), 3);
        assert_eq!(lex.score("BAD"), -3);
        assert_eq!(lex.score("meh"), 0);
        assert_eq!(lex.score("absent"), 0);

        std::fs::write(&path, "good\t6\n").unwrap();
        assert!(ScoredLexicon::load(&path).is_err(), "score out of range");
        std::fs::write(&path, "good three\n").unwrap();
        assert!(ScoredLexicon::load(&path).is_err(), "missing tab");
    }

    #[test]
    fn polarity_lexicon_rejects_overlap() {
        let ok = PolarityLexicon::from_words(["good"], ["bad"]).unwrap();
        assert_eq!(ok.polarity("good"), 1);
        assert_eq!(ok.polarity("bad"), -1);
        assert_eq!(ok.polarity("meh"), 0);
        assert!(PolarityLexicon::from_words(["same"], ["same"]).is_err());
    }

    #[test]
    fn combined_sentiment_vote_table() {
        let scored = ScoredLexicon::from_pairs([("great", 3), ("awful", -2), ("meh", 0)]);
        let polarity = PolarityLexicon::from_words(
            ["great", "meh", "shiny"],
            ["awful", "gloomy"],
        )
        .unwrap();
        // Both lexicons agree: magnitude 2.
        assert_eq!(combined_sentiment("great", &scored, &polarity), 2);
        assert_eq!(combined_sentiment("awful", &scored, &polarity), -2);
        // Only one lexicon fires: magnitude 1.
        assert_eq!(combined_sentiment("shiny", &scored, &polarity), 1);
        assert_eq!(combined_sentiment("gloomy", &scored, &polarity), -1);
        // Scored-only words keep their sign at magnitude 1.
        let scored_only = ScoredLexicon::from_pairs([("quiet", -1)]);
        assert_eq!(
            combined_sentiment("quiet", &scored_only, &PolarityLexicon::default()),
            -1
        );
        // Zero-scored entries count as absent, so the polarity vote stands.
        assert_eq!(combined_sentiment("meh", &scored, &polarity), 1);
        // Neither lexicon knows the word.
        assert_eq!(combined_sentiment("table", &scored, &polarity), 0);
        // Contradiction neutralizes.
        let contradicting = ScoredLexicon::from_pairs([("shiny", -4)]);
        assert_eq!(combined_sentiment("shiny", &contradicting, &polarity), 0);
    }

    fn token(index: usize, word: &str) -> Token {
        Token {
            index,
            surface: word.to_string(),
            normalized: word.to_string(),
            pos: "WORD".to_string(),
        }
    }

    #[test]
    fn negation_window_covers_two_previous_tokens() {
        let cats = category_fixture();
        let tokens = vec![
            token(1, "not"),
            token(2, "very"),
            token(3, "good"),
            token(4, "movie"),
        ];
        // "not" sits two positions before "good": inverted.
        assert_eq!(apply_negation(2, 3, &tokens, &cats), -2);
        // "good" at position 4 only sees positions 2 and 3: no negation.
        assert_eq!(apply_negation(2, 4, &tokens, &cats), 2);
        // Window must not look forward.
        assert_eq!(apply_negation(1, 1, &tokens, &cats), 1);
        // Double application restores the score.
        let once = apply_negation(2, 3, &tokens, &cats);
        assert_eq!(apply_negation(once, 3, &tokens, &cats), 2);
    }
}
