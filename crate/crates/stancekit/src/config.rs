//! TOML run configuration: shared resource paths plus per-topic settings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::corpus::StanceLabel;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureFamily};
use crate::harvest::{NoneSource, SeedRule, SeedRuleSet};
use crate::pmi::DEFAULT_MIN_DF;
use crate::selection::SelectionMethod;

/// Default per-topic smoothing constant.
pub const DEFAULT_ALPHA: f64 = 1.0;
/// Default feature count kept by a selection method.
pub const DEFAULT_SELECTION_K: usize = 2000;
/// Default top slice of the association table forming the PMI pool.
pub const DEFAULT_TOP_PERCENT: f64 = 10.0;

/// Whole-run configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub resources: ResourcePaths,
    pub topics: BTreeMap<String, TopicConfig>,
}

/// Paths to shared lexicons, all optional; commands that need an absent one
/// fail with an error naming it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourcePaths {
    pub dictionary: Option<PathBuf>,
    pub normalization_lexicon: Option<PathBuf>,
    pub category_lexicon: Option<PathBuf>,
    pub scored_lexicon: Option<PathBuf>,
    pub polarity_positive: Option<PathBuf>,
    pub polarity_negative: Option<PathBuf>,
}

/// Conjunctive seed-term lists per stance; each inner list is one rule.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesConfig {
    #[serde(default)]
    pub favor: Vec<Vec<String>>,
    #[serde(default)]
    pub against: Vec<Vec<String>>,
}

impl RulesConfig {
    pub fn is_empty(&self) -> bool {
        self.favor.is_empty() && self.against.is_empty()
    }
}

fn default_features() -> Vec<String> {
    vec!["unigram".to_string(), "bigram".to_string()]
}

fn default_selection() -> String {
    SelectionMethod::None.name().to_string()
}

fn default_selection_k() -> usize {
    DEFAULT_SELECTION_K
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_true() -> bool {
    true
}

fn default_top_percent() -> f64 {
    DEFAULT_TOP_PERCENT
}

fn default_min_df() -> usize {
    DEFAULT_MIN_DF
}

fn default_none_sources() -> Vec<String> {
    vec!["other_topics".to_string(), "random_pool".to_string()]
}

/// Settings for one topic.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicConfig {
    /// Feature family names for the topic's best model.
    #[serde(default = "default_features")]
    pub features: Vec<String>,
    #[serde(default = "default_selection")]
    pub selection: String,
    #[serde(default = "default_selection_k")]
    pub selection_k: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_true")]
    pub use_stemmed: bool,
    #[serde(default = "default_true")]
    pub use_unstemmed: bool,
    #[serde(default)]
    pub strip_hashtags: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_top_percent")]
    pub pmi_top_percent: f64,
    #[serde(default = "default_min_df")]
    pub pmi_min_df: usize,
    #[serde(default)]
    pub per_class_cap: Option<usize>,
    #[serde(default = "default_none_sources")]
    pub none_sources: Vec<String>,
    #[serde(default)]
    pub rules: RulesConfig,
    /// Unlabeled harvest input (tweets of this and other topics).
    #[serde(default)]
    pub raw_tweets: Option<PathBuf>,
    /// Extra random-stream tweets usable as NONE examples.
    #[serde(default)]
    pub none_pool: Option<PathBuf>,
    #[serde(default)]
    pub train: Option<PathBuf>,
    #[serde(default)]
    pub test: Option<PathBuf>,
    /// Stored dependency parses; tweets without a block get fallback parses.
    #[serde(default)]
    pub parses: Option<PathBuf>,
    /// JSONL topic/text corpus for association scoring.
    #[serde(default)]
    pub pmi_corpus: Option<PathBuf>,
    /// Prebuilt association model.
    #[serde(default)]
    pub pmi_model: Option<PathBuf>,
}

impl TopicConfig {
    /// Feature configuration resolved from the string lists and flags.
    pub fn feature_config(&self) -> Result<FeatureConfig> {
        let families = self
            .features
            .iter()
            .map(|name| name.parse::<FeatureFamily>())
            .collect::<Result<_>>()?;
        let config = FeatureConfig {
            families,
            use_stemmed: self.use_stemmed,
            use_unstemmed: self.use_unstemmed,
            strip_hashtags: self.strip_hashtags,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn selection_method(&self) -> Result<SelectionMethod> {
        self.selection.parse()
    }

    pub fn none_sources(&self) -> Result<Vec<NoneSource>> {
        if self.none_sources.is_empty() {
            return Err(Error::param("none_sources", "list is empty"));
        }
        self.none_sources.iter().map(|s| NoneSource::parse(s)).collect()
    }

    /// Seed rules for this topic; errors when none are configured.
    pub fn seed_rules(&self, topic: &str) -> Result<SeedRuleSet> {
        if self.rules.is_empty() {
            return Err(Error::MissingResource {
                what: "seed rules".to_string(),
                detail: format!("topic {topic:?} configures no rules"),
            });
        }
        let mut rules = Vec::new();
        for terms in &self.rules.favor {
            rules.push(SeedRule::new(topic, StanceLabel::Favor, terms)?);
        }
        for terms in &self.rules.against {
            rules.push(SeedRule::new(topic, StanceLabel::Against, terms)?);
        }
        SeedRuleSet::new(rules)
    }

    fn validate(&self, topic: &str) -> Result<()> {
        let context = |message: String| Error::InvalidConfig {
            message: format!("topic {topic:?}: {message}"),
        };
        self.feature_config()
            .map_err(|e| context(e.to_string()))?;
        self.selection_method().map_err(|e| context(e.to_string()))?;
        self.none_sources().map_err(|e| context(e.to_string()))?;
        if self.selection_k == 0 {
            return Err(context("selection_k must be at least 1".into()));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(context(format!("alpha must be finite and positive, got {}", self.alpha)));
        }
        if !(self.pmi_top_percent > 0.0 && self.pmi_top_percent <= 100.0) {
            return Err(context(format!(
                "pmi_top_percent must be in (0, 100], got {}",
                self.pmi_top_percent
            )));
        }
        if self.pmi_min_df == 0 {
            return Err(context("pmi_min_df must be at least 1".into()));
        }
        if self.per_class_cap == Some(0) {
            return Err(context("per_class_cap must be at least 1".into()));
        }
        Ok(())
    }
}

fn rebase(path: &mut Option<PathBuf>, base: &Path) {
    if let Some(p) = path {
        if p.is_relative() {
            *p = base.join(&p);
        }
    }
}

impl RunConfig {
    /// Parse a configuration document. Relative paths stay as written; use
    /// [`load`](Self::load) to anchor them at the file's directory.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig {
            message: e.to_string().replace('\n', " "),
        })?;
        if config.topics.is_empty() {
            return Err(Error::InvalidConfig {
                message: "no topics configured".to_string(),
            });
        }
        for (topic, tc) in &config.topics {
            tc.validate(topic)?;
        }
        Ok(config)
    }

    /// Read and validate a configuration file. Relative paths inside the file
    /// are resolved against the file's own directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if base != Path::new("") {
            config.rebase_paths(base);
        }
        Ok(config)
    }

    fn rebase_paths(&mut self, base: &Path) {
        let r = &mut self.resources;
        for p in [
            &mut r.dictionary,
            &mut r.normalization_lexicon,
            &mut r.category_lexicon,
            &mut r.scored_lexicon,
            &mut r.polarity_positive,
            &mut r.polarity_negative,
        ] {
            rebase(p, base);
        }
        for tc in self.topics.values_mut() {
            for p in [
                &mut tc.raw_tweets,
                &mut tc.none_pool,
                &mut tc.train,
                &mut tc.test,
                &mut tc.parses,
                &mut tc.pmi_corpus,
                &mut tc.pmi_model,
            ] {
                rebase(p, base);
            }
        }
    }

    /// The named topic's settings, or an error listing what exists.
    pub fn topic(&self, name: &str) -> Result<&TopicConfig> {
        self.topics.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.topics.keys().map(String::as_str).collect();
            Error::InvalidConfig {
                message: format!("unknown topic {name:?} (configured: {})", known.join(", ")),
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r##"
[resources]
dictionary = "lex/words.txt"
normalization_lexicon = "lex/norm.tsv"
category_lexicon = "lex/categories.txt"
scored_lexicon = "lex/scored.tsv"
polarity_positive = "lex/positive.txt"
polarity_negative = "lex/negative.txt"

[topics.climate]
features = ["unigram", "bigram", "dep", "liwc_dep", "opinion_dep"]
selection = "correlation"
selection_k = 500
alpha = 0.5
strip_hashtags = true
seed = 11
pmi_top_percent = 25.0
per_class_cap = 1000
raw_tweets = "data/climate_raw.jsonl"
train = "data/climate_train.jsonl"
test = "data/climate_test.jsonl"

[topics.climate.rules]
favor = [["#actonclimate"], ["#climatechange", "real"]]
against = [["#climatehoax"]]

[topics.abortion]
train = "data/abortion_train.jsonl"
test = "data/abortion_test.jsonl"
"##;

    #[test]
    fn full_config_parses_with_typed_accessors() {
        let config = RunConfig::from_toml(FULL).unwrap();
        let climate = config.topic("climate").unwrap();
        let fc = climate.feature_config().unwrap();
        assert!(fc.families.contains(&FeatureFamily::OpinionDep));
        assert!(fc.strip_hashtags);
        assert_eq!(climate.selection_method().unwrap(), SelectionMethod::Correlation);
        assert_eq!(climate.selection_k, 500);
        assert_eq!(climate.alpha, 0.5);
        assert_eq!(climate.pmi_top_percent, 25.0);
        assert_eq!(climate.per_class_cap, Some(1000));
        let rules = climate.seed_rules("climate").unwrap();
        assert_eq!(rules.rules().len(), 3);
        assert!(config.topic("guns").is_err());
    }

    #[test]
    fn defaults_fill_optional_fields() {
        let config = RunConfig::from_toml(FULL).unwrap();
        let abortion = config.topic("abortion").unwrap();
        assert_eq!(abortion.features, vec!["unigram", "bigram"]);
        assert_eq!(abortion.selection_method().unwrap(), SelectionMethod::None);
        assert_eq!(abortion.selection_k, DEFAULT_SELECTION_K);
        assert_eq!(abortion.alpha, DEFAULT_ALPHA);
        assert!(abortion.use_stemmed && abortion.use_unstemmed);
        assert!(!abortion.strip_hashtags);
        assert_eq!(abortion.seed, 0);
        assert_eq!(abortion.pmi_top_percent, DEFAULT_TOP_PERCENT);
        assert_eq!(abortion.pmi_min_df, DEFAULT_MIN_DF);
        assert_eq!(
            abortion.none_sources().unwrap(),
            vec![NoneSource::OtherTopics, NoneSource::RandomPool]
        );
        assert!(abortion.seed_rules("abortion").is_err(), "no rules configured");
    }

    #[test]
    fn load_resolves_relative_paths_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("conf");
        std::fs::create_dir(&sub).unwrap();
        let path = sub.join("run.toml");
        std::fs::write(&path, FULL).unwrap();
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(
            config.resources.dictionary.as_deref(),
            Some(sub.join("lex/words.txt").as_path())
        );
        assert_eq!(
            config.topic("climate").unwrap().train.as_deref(),
            Some(sub.join("data/climate_train.jsonl").as_path())
        );
    }

    #[test]
    fn invalid_values_are_rejected_with_topic_context() {
        let cases = [
            ("features = []", "no families"),
            ("features = [\"u\"]", "unknown feature family"),
            ("selection = \"best\"", "unknown method"),
            ("selection_k = 0", "selection_k"),
            ("alpha = 0.0", "alpha"),
            ("alpha = -1.0", "alpha"),
            ("pmi_top_percent = 0.0", "pmi_top_percent"),
            ("pmi_top_percent = 101.0", "pmi_top_percent"),
            ("pmi_min_df = 0", "pmi_min_df"),
            ("per_class_cap = 0", "per_class_cap"),
            ("none_sources = []", "none_sources"),
            ("none_sources = [\"elsewhere\"]", "none_sources"),
        ];
        for (line, needle) in cases {
            let text = format!("[topics.t]\n{line}\n");
            let err = RunConfig::from_toml(&text).unwrap_err();
            let message = err.to_string();
            assert!(
                message.contains("topic \"t\"") || message.contains(needle),
                "{line}: {message}"
            );
        }
    }

    #[test]
    fn unknown_keys_and_empty_configs_are_rejected() {
        assert!(RunConfig::from_toml("[topics.t]\nbogus_key = 1\n").is_err());
        assert!(RunConfig::from_toml("").is_err(), "no topics");
        assert!(RunConfig::from_toml("[resources]\ndictionary = \"d\"\n").is_err());
    }

    #[test]
    fn stemming_flags_must_leave_ngrams_extractable() {
        let text = "[topics.t]\nuse_stemmed = false\nuse_unstemmed = false\n";
        assert!(RunConfig::from_toml(text).is_err());
    }

    #[test]
    fn rules_need_both_stances() {
        let text = "[topics.t]\n[topics.t.rules]\nfavor = [[\"#yes\"]]\n";
        let config = RunConfig::from_toml(text).unwrap();
        assert!(config.topic("t").unwrap().seed_rules("t").is_err());
    }
}
