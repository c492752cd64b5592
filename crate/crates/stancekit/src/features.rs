//! Feature extraction over parsed tweets.
//!
//! Eleven feature families share one sparse vector, each under its own name
//! prefix so families never collide: `u:`/`us:` unigrams, `b:`/`bs:`
//! bigrams, `pos2:`/`pos3:` tag n-grams, `liwc:` category counts, `dep:`
//! word-pair arcs, `ldep:` category-generalized arcs, `odep:`
//! sentiment-generalized arcs, and `pmi:*` topic-association summaries.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::corpus::{ArcHead, ParsedTweet, StanceLabel, Token};
use crate::error::{Error, Result};
use crate::lexicons::{apply_negation, combined_sentiment, CategoryLexicon, PolarityLexicon, ScoredLexicon};
use crate::normalize::strip_hashtags;
use crate::pmi::{distinct_ngrams, npmi_bin_label, PmiModel, MAX_NGRAM};
use crate::stem::stem;

/// Environment variable capping the worker threads used for batch
/// featurization.
pub const THREADS_ENV_VAR: &str = "STANCEKIT_THREADS";

/// Sparse feature vector with deterministic iteration order.
///
/// Zero values are never stored: adding zero is a no-op, so the map only
/// holds features that actually fired.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector(BTreeMap<String, f64>);

impl FeatureVector {
    pub fn new() -> Self {
        FeatureVector::default()
    }

    /// Accumulate `value` onto `name`. Zero contributions are dropped.
    pub fn add(&mut self, name: impl Into<String>, value: f64) {
        if value == 0.0 {
            return;
        }
        *self.0.entry(name.into()).or_insert(0.0) += value;
    }

    /// Count one occurrence of `name`.
    pub fn bump(&mut self, name: impl Into<String>) {
        self.add(name, 1.0);
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Iterate features in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Fold another vector into this one, summing shared names.
    pub fn merge(&mut self, other: FeatureVector) {
        for (name, value) in other.0 {
            self.add(name, value);
        }
    }

    /// Drop every feature whose name is not in `keep`.
    pub fn retain_names(&mut self, keep: &HashSet<String>) {
        self.0.retain(|name, _| keep.contains(name));
    }
}

impl FromIterator<(String, f64)> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        let mut fv = FeatureVector::new();
        for (name, value) in iter {
            fv.add(name, value);
        }
        fv
    }
}

/// The selectable feature families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureFamily {
    Unigram,
    Bigram,
    Dep,
    LiwcDep,
    OpinionDep,
    PosBigram,
    PosTrigram,
    Liwc,
    PmiCount,
    PmiMax,
    PmiInTopic,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 11] = [
        FeatureFamily::Unigram,
        FeatureFamily::Bigram,
        FeatureFamily::Dep,
        FeatureFamily::LiwcDep,
        FeatureFamily::OpinionDep,
        FeatureFamily::PosBigram,
        FeatureFamily::PosTrigram,
        FeatureFamily::Liwc,
        FeatureFamily::PmiCount,
        FeatureFamily::PmiMax,
        FeatureFamily::PmiInTopic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureFamily::Unigram => "unigram",
            FeatureFamily::Bigram => "bigram",
            FeatureFamily::Dep => "dep",
            FeatureFamily::LiwcDep => "liwc_dep",
            FeatureFamily::OpinionDep => "opinion_dep",
            FeatureFamily::PosBigram => "pos_bigram",
            FeatureFamily::PosTrigram => "pos_trigram",
            FeatureFamily::Liwc => "liwc",
            FeatureFamily::PmiCount => "pmi_count",
            FeatureFamily::PmiMax => "pmi_max",
            FeatureFamily::PmiInTopic => "pmi_in_topic",
        }
    }
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFeatureFamily { name: s.to_string() })
    }
}

/// Which families to extract and how to treat word forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    pub families: BTreeSet<FeatureFamily>,
    /// Emit stemmed n-gram variants (`us:`/`bs:`).
    pub use_stemmed: bool,
    /// Emit surface-form n-gram variants (`u:`/`b:`).
    pub use_unstemmed: bool,
    /// Remove hashtag tokens before extracting anything.
    pub strip_hashtags: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            families: BTreeSet::new(),
            use_stemmed: true,
            use_unstemmed: true,
            strip_hashtags: false,
        }
    }
}

impl FeatureConfig {
    /// Convenience constructor from a family list.
    pub fn with_families(families: impl IntoIterator<Item = FeatureFamily>) -> Self {
        FeatureConfig {
            families: families.into_iter().collect(),
            ..FeatureConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::param("feature config", "no families enabled"));
        }
        let ngrams = self.families.contains(&FeatureFamily::Unigram)
            || self.families.contains(&FeatureFamily::Bigram);
        if ngrams && !self.use_stemmed && !self.use_unstemmed {
            return Err(Error::param(
                "feature config",
                "n-gram families need use_stemmed or use_unstemmed",
            ));
        }
        Ok(())
    }
}

/// Borrowed lexicon and model handles for feature extraction. Families that
/// need an absent resource make [`featurize`] fail rather than silently
/// vanish.
#[derive(Debug, Clone, Copy, Default)]
pub struct FeatureResources<'a> {
    pub categories: Option<&'a CategoryLexicon>,
    pub scored: Option<&'a ScoredLexicon>,
    pub polarity: Option<&'a PolarityLexicon>,
    pub pmi: Option<&'a PmiModel>,
}

fn norm_lower(token: &Token) -> String {
    token.normalized.to_lowercase()
}

/// Unigram and bigram counts over lowercased normalized tokens.
///
/// Adjacent tokens join with `_`; stemmed and unstemmed variants live under
/// separate prefixes and can be enabled independently.
pub fn ngram_features(parsed: &ParsedTweet, config: &FeatureConfig) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let words: Vec<String> = parsed.tokens.iter().map(norm_lower).collect();
    let stems: Vec<String> = if config.use_stemmed {
        words.iter().map(|w| stem(w)).collect()
    } else {
        Vec::new()
    };
    if config.families.contains(&FeatureFamily::Unigram) {
        if config.use_unstemmed {
            for w in &words {
                fv.bump(format!("u:{w}"));
            }
        }
        if config.use_stemmed {
            for s in &stems {
                fv.bump(format!("us:{s}"));
            }
        }
    }
    if config.families.contains(&FeatureFamily::Bigram) {
        if config.use_unstemmed {
            for pair in words.windows(2) {
                fv.bump(format!("b:{}_{}", pair[0], pair[1]));
            }
        }
        if config.use_stemmed {
            for pair in stems.windows(2) {
                fv.bump(format!("bs:{}_{}", pair[0], pair[1]));
            }
        }
    }
    fv
}

/// Part-of-speech bigram and trigram counts under `pos2:`/`pos3:`.
pub fn pos_ngram_features(parsed: &ParsedTweet, bigrams: bool, trigrams: bool) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let tags: Vec<&str> = parsed.tokens.iter().map(|t| t.pos.as_str()).collect();
    if bigrams {
        for pair in tags.windows(2) {
            fv.bump(format!("pos2:{}_{}", pair[0], pair[1]));
        }
    }
    if trigrams {
        for triple in tags.windows(3) {
            fv.bump(format!("pos3:{}_{}_{}", triple[0], triple[1], triple[2]));
        }
    }
    fv
}

/// Category occurrence counts under `liwc:`; every category of every token
/// counts once per token occurrence.
pub fn category_count_features(parsed: &ParsedTweet, categories: &CategoryLexicon) -> FeatureVector {
    let mut fv = FeatureVector::new();
    for token in &parsed.tokens {
        for cat in categories.lookup(&norm_lower(token)) {
            fv.bump(format!("liwc:{cat}"));
        }
    }
    fv
}

fn token_by_index(parsed: &ParsedTweet, index: usize) -> Option<&Token> {
    // Validated parses keep tokens sorted with index == position + 1.
    parsed.tokens.get(index - 1).filter(|t| t.index == index)
}

/// Head-child word pairs under `dep:`. Root arcs use `ROOT` as the head
/// word; arcs whose child is excluded from the tree are skipped.
pub fn dep_features(parsed: &ParsedTweet) -> FeatureVector {
    let mut fv = FeatureVector::new();
    for arc in &parsed.arcs {
        let Some(child) = token_by_index(parsed, arc.child) else {
            continue;
        };
        match arc.head {
            ArcHead::Root => fv.bump(format!("dep:ROOT_{}", norm_lower(child))),
            ArcHead::Token(h) => {
                if let Some(head) = token_by_index(parsed, h) {
                    fv.bump(format!("dep:{}_{}", norm_lower(head), norm_lower(child)));
                }
            }
            ArcHead::Excluded => {}
        }
    }
    fv
}

/// Category-generalized arcs under `ldep:`: each real head-child pair emits
/// one feature per category of the child (`ldep:head_[cat]`) and one per
/// category of the head (`ldep:[cat]_child`).
pub fn liwc_dep_features(parsed: &ParsedTweet, categories: &CategoryLexicon) -> FeatureVector {
    let mut fv = FeatureVector::new();
    for arc in &parsed.arcs {
        let ArcHead::Token(h) = arc.head else {
            continue;
        };
        let (Some(head), Some(child)) = (token_by_index(parsed, h), token_by_index(parsed, arc.child))
        else {
            continue;
        };
        let head_word = norm_lower(head);
        let child_word = norm_lower(child);
        for cat in categories.lookup(&child_word) {
            fv.bump(format!("ldep:{head_word}_[{cat}]"));
        }
        for cat in categories.lookup(&head_word) {
            fv.bump(format!("ldep:[{cat}]_{child_word}"));
        }
    }
    fv
}

/// Combined sentiment of one token in context: the two-lexicon vote,
/// inverted when either of the two preceding tokens is a negation word.
fn sentiment_in_context(
    token: &Token,
    parsed: &ParsedTweet,
    scored: &ScoredLexicon,
    polarity: &PolarityLexicon,
    categories: &CategoryLexicon,
) -> i8 {
    let base = combined_sentiment(&norm_lower(token), scored, polarity);
    apply_negation(base, token.index, &parsed.tokens, categories)
}

/// Sentiment-generalized arcs under `odep:`: when an endpoint of a real arc
/// carries a nonzero combined sentiment, that endpoint is replaced by the
/// signed score (`odep:head_-2`, `odep:+1_child`).
pub fn opinion_dep_features(
    parsed: &ParsedTweet,
    scored: &ScoredLexicon,
    polarity: &PolarityLexicon,
    categories: &CategoryLexicon,
) -> FeatureVector {
    let mut fv = FeatureVector::new();
    for arc in &parsed.arcs {
        let ArcHead::Token(h) = arc.head else {
            continue;
        };
        let (Some(head), Some(child)) = (token_by_index(parsed, h), token_by_index(parsed, arc.child))
        else {
            continue;
        };
        let head_score = sentiment_in_context(head, parsed, scored, polarity, categories);
        let child_score = sentiment_in_context(child, parsed, scored, polarity, categories);
        if child_score != 0 {
            fv.bump(format!("odep:{}_{child_score:+}", norm_lower(head)));
        }
        if head_score != 0 {
            fv.bump(format!("odep:{head_score:+}_{}", norm_lower(child)));
        }
    }
    fv
}

/// Topic-association summaries under `pmi:`.
///
/// `pmi:count` counts the tweet's distinct n-grams found in the topic pool;
/// `pmi:max:<bin>` marks the binned maximum score over table hits; and
/// `pmi:intopic` fires when the best-scoring n-gram (ties broken toward the
/// alphabetically first) is in the pool. Tweets with no table hits get no
/// `pmi:max`/`pmi:intopic` features at all.
pub fn pmi_features(
    parsed: &ParsedTweet,
    model: &PmiModel,
    count: bool,
    max: bool,
    in_topic: bool,
) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let words: Vec<String> = parsed.tokens.iter().map(norm_lower).collect();
    let grams = distinct_ngrams(&words, MAX_NGRAM);
    if count {
        let pooled = grams.iter().filter(|g| model.in_pool(g)).count();
        if pooled > 0 {
            fv.add("pmi:count", pooled as f64);
        }
    }
    if max || in_topic {
        // BTreeSet iteration is ascending, so strict greater-than keeps the
        // alphabetically first n-gram on ties.
        let mut best: Option<(&str, f64)> = None;
        for gram in &grams {
            if let Some(score) = model.npmi(gram) {
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((gram, score));
                }
            }
        }
        if let Some((gram, score)) = best {
            if max {
                fv.add(format!("pmi:max:{}", npmi_bin_label(score)), 1.0);
            }
            if in_topic && model.in_pool(gram) {
                fv.add("pmi:intopic", 1.0);
            }
        }
    }
    fv
}

fn require<'a, T>(resource: Option<&'a T>, family: FeatureFamily, what: &str) -> Result<&'a T> {
    resource.ok_or_else(|| Error::MissingResource {
        what: format!("{family} features"),
        detail: format!("{what} not loaded"),
    })
}

/// Extract every enabled family for one tweet and merge the results.
///
/// Hashtag stripping, when enabled, happens once up front and therefore
/// affects every family. Families whose lexicons or models are missing from
/// `resources` produce an error.
pub fn featurize(
    parsed: &ParsedTweet,
    config: &FeatureConfig,
    resources: &FeatureResources<'_>,
) -> Result<FeatureVector> {
    config.validate()?;
    let parsed: Cow<'_, ParsedTweet> = if config.strip_hashtags {
        Cow::Owned(strip_hashtags(parsed))
    } else {
        Cow::Borrowed(parsed)
    };
    let parsed = parsed.as_ref();

    let mut fv = ngram_features(parsed, config);
    fv.merge(pos_ngram_features(
        parsed,
        config.families.contains(&FeatureFamily::PosBigram),
        config.families.contains(&FeatureFamily::PosTrigram),
    ));
    if config.families.contains(&FeatureFamily::Dep) {
        fv.merge(dep_features(parsed));
    }
    if config.families.contains(&FeatureFamily::Liwc) {
        let categories = require(resources.categories, FeatureFamily::Liwc, "category lexicon")?;
        fv.merge(category_count_features(parsed, categories));
    }
    if config.families.contains(&FeatureFamily::LiwcDep) {
        let categories = require(resources.categories, FeatureFamily::LiwcDep, "category lexicon")?;
        fv.merge(liwc_dep_features(parsed, categories));
    }
    if config.families.contains(&FeatureFamily::OpinionDep) {
        let scored = require(resources.scored, FeatureFamily::OpinionDep, "scored lexicon")?;
        let polarity = require(resources.polarity, FeatureFamily::OpinionDep, "polarity lexicon")?;
        let categories = require(
            resources.categories,
            FeatureFamily::OpinionDep,
            "category lexicon (negation words)",
        )?;
        fv.merge(opinion_dep_features(parsed, scored, polarity, categories));
    }
    let want_count = config.families.contains(&FeatureFamily::PmiCount);
    let want_max = config.families.contains(&FeatureFamily::PmiMax);
    let want_topic = config.families.contains(&FeatureFamily::PmiInTopic);
    if want_count || want_max || want_topic {
        let family = if want_count {
            FeatureFamily::PmiCount
        } else if want_max {
            FeatureFamily::PmiMax
        } else {
            FeatureFamily::PmiInTopic
        };
        let model = require(resources.pmi, family, "pmi model")?;
        fv.merge(pmi_features(parsed, model, want_count, want_max, want_topic));
    }
    Ok(fv)
}

fn worker_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV_VAR)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0); // 0 lets the pool pick its default
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("worker pool construction cannot fail with a plain size")
    })
}

/// Featurize a corpus in parallel, preserving input order.
///
/// Worker count follows the `STANCEKIT_THREADS` environment variable when
/// set. Parallelism never changes the result: each tweet is independent and
/// results are collected back in order.
pub fn featurize_corpus(
    parsed: &[ParsedTweet],
    config: &FeatureConfig,
    resources: &FeatureResources<'_>,
) -> Result<Vec<FeatureVector>> {
    config.validate()?;
    worker_pool().install(|| {
        parsed
            .par_iter()
            .map(|p| featurize(p, config, resources))
            .collect()
    })
}

/// One line of a feature file: tweet id, optional gold label, features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub label: Option<StanceLabel>,
    pub features: FeatureVector,
}

/// Write feature rows as TSV: `id<TAB>label<TAB>name=value ...` with
/// features in name order and `-` for missing labels.
pub fn save_features(path: impl AsRef<Path>, rows: &[FeatureRow]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut seen = HashSet::new();
    for row in rows {
        if !seen.insert(row.id.as_str()) {
            return Err(Error::DuplicateId { id: row.id.clone() });
        }
        let label = row.label.map_or("-", |l| l.as_str());
        write!(w, "{}\t{}\t", row.id, label).map_err(|e| Error::io(path, e))?;
        let mut first = true;
        for (name, value) in row.features.iter() {
            if name.contains([' ', '\t', '\n']) {
                return Err(Error::param(
                    "feature name",
                    format!("{name:?} contains whitespace"),
                ));
            }
            if !first {
                write!(w, " ").map_err(|e| Error::io(path, e))?;
            }
            write!(w, "{name}={value}").map_err(|e| Error::io(path, e))?;
            first = false;
        }
        writeln!(w).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a feature file written by [`save_features`].
pub fn load_features(path: impl AsRef<Path>) -> Result<Vec<FeatureRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let (Some(id), Some(label)) = (fields.next(), fields.next()) else {
            return Err(Error::malformed(path, idx + 1, "expected id<TAB>label<TAB>features"));
        };
        if id.is_empty() {
            return Err(Error::malformed(path, idx + 1, "empty tweet id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId { id: id.to_string() });
        }
        let label = match label {
            "-" => None,
            other => Some(
                other
                    .parse::<StanceLabel>()
                    .map_err(|e| Error::malformed(path, idx + 1, e.to_string()))?,
            ),
        };
        let mut features = FeatureVector::new();
        let rest = fields.next().unwrap_or("");
        for part in rest.split(' ').filter(|p| !p.is_empty()) {
            let (name, value) = part.rsplit_once('=').ok_or_else(|| {
                Error::malformed(path, idx + 1, format!("bad feature {part:?}"))
            })?;
            let value: f64 = value.parse().map_err(|_| {
                Error::malformed(path, idx + 1, format!("bad value in {part:?}"))
            })?;
            features.add(name.to_string(), value);
        }
        rows.push(FeatureRow {
            id: id.to_string(),
            label,
            features,
        });
    }
    Ok(rows)
}
