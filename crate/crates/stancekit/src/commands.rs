//! Implementations behind the CLI subcommands.
//!
//! Every command reads its inputs through the shared configuration, writes
//! its declared artifacts into an output directory, and drops a manifest
//! with digests of everything it read and wrote.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{ResourcePaths, RunConfig, TopicConfig};
use crate::corpus::{attach_parses, load_parses, load_tweets, save_parses, save_tweets, Parse, ParsedTweet, StanceLabel, Tweet};
use crate::error::{Error, Result};
use crate::eval::{evaluate, learning_curve, run_ablation, save_report_csv, train_eval_once, EvalReport, ReportRow};
use crate::features::{featurize_corpus, load_features, save_features, FeatureConfig, FeatureFamily, FeatureResources, FeatureRow};
use crate::harvest::{balance_classes, filter_duplicates, filter_min_dictionary, rule_report, weak_label, BalanceConfig, RuleReport};
use crate::lexicons::{CategoryLexicon, PolarityLexicon, ScoredLexicon};
use crate::manifest::{sha256_file, RunManifest};
use crate::model::{train_nb, NbModel};
use crate::normalize::{Dictionary, NormalizationLexicon, Normalizer};
use crate::pmi::{build_pmi_model, load_pmi_corpus, PmiModel};
use crate::selection::{rank_features, select_features, SelectionMethod};

/// A validated configuration plus the digest of its file, shared by every
/// command of one invocation.
#[derive(Debug, Clone)]
pub struct CommandContext {
    pub config: RunConfig,
    pub config_path: PathBuf,
    pub config_digest: String,
}

impl CommandContext {
    pub fn load(config_path: impl Into<PathBuf>) -> Result<Self> {
        let config_path = config_path.into();
        let config_digest = sha256_file(&config_path)?;
        let config = RunConfig::load(&config_path)?;
        Ok(CommandContext {
            config,
            config_path,
            config_digest,
        })
    }

    fn manifest(&self, command: &str, topic: &str, seed: u64) -> RunManifest {
        RunManifest::new(command, topic, seed, self.config_digest.clone())
    }
}

fn ensure_out_dir(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| Error::MissingResource {
        what: what.to_string(),
        detail: "no path configured".to_string(),
    })
}

/// Output file stem taken from an input path (`train.jsonl` → `train`).
fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}

/// Build a normalizer from the configured dictionary and repair lexicon,
/// treating missing paths as empty resources. Also returns the files read.
pub fn build_normalizer(resources: &ResourcePaths) -> Result<(Normalizer, Vec<PathBuf>)> {
    let mut used = Vec::new();
    let dictionary = match &resources.dictionary {
        Some(path) => {
            used.push(path.clone());
            Dictionary::load(path)?
        }
        None => Dictionary::default(),
    };
    let lexicon = match &resources.normalization_lexicon {
        Some(path) => {
            used.push(path.clone());
            NormalizationLexicon::load(path)?
        }
        None => NormalizationLexicon::default(),
    };
    Ok((Normalizer::new(dictionary, lexicon), used))
}

fn load_normalizer(resources: &ResourcePaths, manifest: &mut RunManifest) -> Result<Normalizer> {
    let (normalizer, used) = build_normalizer(resources)?;
    for path in used {
        manifest.input(path)?;
    }
    Ok(normalizer)
}

fn load_dictionary(resources: &ResourcePaths, manifest: &mut RunManifest) -> Result<Dictionary> {
    let path = required(&resources.dictionary, "dictionary")?;
    manifest.input(path)?;
    Dictionary::load(path)
}

/// Owned lexicons and models backing a [`FeatureResources`] view.
#[derive(Debug, Default)]
pub struct OwnedFeatureResources {
    pub categories: Option<CategoryLexicon>,
    pub scored: Option<ScoredLexicon>,
    pub polarity: Option<PolarityLexicon>,
    pub pmi: Option<PmiModel>,
}

impl OwnedFeatureResources {
    pub fn as_refs(&self) -> FeatureResources<'_> {
        FeatureResources {
            categories: self.categories.as_ref(),
            scored: self.scored.as_ref(),
            polarity: self.polarity.as_ref(),
            pmi: self.pmi.as_ref(),
        }
    }

    /// Load exactly the resources the enabled families require. Also returns
    /// the files read so callers can record them.
    pub fn load(
        resources: &ResourcePaths,
        topic_config: &TopicConfig,
        topic: &str,
        families: &BTreeSet<FeatureFamily>,
    ) -> Result<(Self, Vec<PathBuf>)> {
        let mut owned = OwnedFeatureResources::default();
        let mut used = Vec::new();
        let needs_categories = [FeatureFamily::Liwc, FeatureFamily::LiwcDep, FeatureFamily::OpinionDep]
            .iter()
            .any(|f| families.contains(f));
        if needs_categories {
            let path = required(&resources.category_lexicon, "category lexicon")?;
            used.push(path.to_path_buf());
            owned.categories = Some(CategoryLexicon::load(path)?);
        }
        if families.contains(&FeatureFamily::OpinionDep) {
            let scored = required(&resources.scored_lexicon, "scored lexicon")?;
            used.push(scored.to_path_buf());
            owned.scored = Some(ScoredLexicon::load(scored)?);
            let positive = required(&resources.polarity_positive, "positive polarity lexicon")?;
            let negative = required(&resources.polarity_negative, "negative polarity lexicon")?;
            used.push(positive.to_path_buf());
            used.push(negative.to_path_buf());
            owned.polarity = Some(PolarityLexicon::load(positive, negative)?);
        }
        let needs_pmi = [FeatureFamily::PmiCount, FeatureFamily::PmiMax, FeatureFamily::PmiInTopic]
            .iter()
            .any(|f| families.contains(f));
        if needs_pmi {
            let path = required(&topic_config.pmi_model, "pmi model")?;
            used.push(path.to_path_buf());
            let model = PmiModel::load(path)?;
            if model.topic != topic {
                return Err(Error::InvalidConfig {
                    message: format!(
                        "pmi model at {} was built for topic {:?}, not {topic:?}",
                        path.display(),
                        model.topic
                    ),
                });
            }
            owned.pmi = Some(model);
        }
        Ok((owned, used))
    }
}

/// Load the resources the enabled families require, recording each file in
/// the manifest.
fn load_feature_resources(
    resources: &ResourcePaths,
    topic_config: &TopicConfig,
    topic: &str,
    families: &BTreeSet<FeatureFamily>,
    manifest: &mut RunManifest,
) -> Result<OwnedFeatureResources> {
    let (owned, used) = OwnedFeatureResources::load(resources, topic_config, topic, families)?;
    for path in used {
        manifest.input(path)?;
    }
    Ok(owned)
}

fn load_attached(
    tweets_path: &Path,
    topic_config: &TopicConfig,
    normalizer: &Normalizer,
    manifest: &mut RunManifest,
) -> Result<Vec<ParsedTweet>> {
    manifest.input(tweets_path)?;
    let tweets = load_tweets(tweets_path)?;
    let parses = match &topic_config.parses {
        Some(path) => {
            manifest.input(path)?;
            load_parses(path)?
        }
        None => BTreeMap::new(),
    };
    Ok(attach_parses(&tweets, &parses, normalizer))
}

fn save_rule_report(path: &Path, rows: &[RuleReport]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "topic\tstance\tterms\tmatches\texamples").map_err(|e| Error::io(path, e))?;
    for row in rows {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            row.topic,
            row.stance,
            row.terms.join(" "),
            row.matches,
            row.examples.join(",")
        )
        .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Build a weakly labeled, filtered, class-balanced training corpus.
///
/// Writes `train.jsonl`, `rule_report.tsv`, and `harvest_manifest.json`.
pub fn cmd_harvest(
    ctx: &CommandContext,
    topic: &str,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let seed = seed_override.unwrap_or(tc.seed);
    let mut manifest = ctx.manifest("harvest", topic, seed);
    ensure_out_dir(out_dir)?;

    let rules = tc.seed_rules(topic)?;
    let raw_path = required(&tc.raw_tweets, "raw tweets")?;
    manifest.input(raw_path)?;
    let mut tweets = load_tweets(raw_path)?;
    if let Some(pool_path) = &tc.none_pool {
        manifest.input(pool_path)?;
        tweets.extend(load_tweets(pool_path)?);
    }
    let dictionary = load_dictionary(&ctx.config.resources, &mut manifest)?;

    let report = rule_report(&tweets, &rules, 5);
    let weak = weak_label(&tweets, &rules);
    let stance_by_id: BTreeMap<&str, StanceLabel> = weak
        .labeled
        .iter()
        .map(|(t, s)| (t.id.as_str(), *s))
        .collect();

    // Quality filters run over matched and candidate tweets together so a
    // NONE candidate duplicating a labeled tweet is dropped too.
    let candidates: Vec<Tweet> = weak
        .labeled
        .iter()
        .map(|(t, _)| t.clone())
        .chain(weak.unmatched.iter().cloned())
        .collect();
    let before_filters = candidates.len();
    let deduped = filter_duplicates(candidates);
    let after_dedup = deduped.len();
    let kept = filter_min_dictionary(deduped, &dictionary)?;
    let after_dictionary = kept.len();

    let (labeled, pool): (Vec<Tweet>, Vec<Tweet>) = kept
        .into_iter()
        .partition(|t| stance_by_id.contains_key(t.id.as_str()));
    let labeled: Vec<(Tweet, StanceLabel)> = labeled
        .into_iter()
        .map(|t| {
            let stance = stance_by_id[t.id.as_str()];
            (t, stance)
        })
        .collect();

    let balance = BalanceConfig {
        topic: topic.to_string(),
        per_class_cap: tc.per_class_cap,
        none_sources: tc.none_sources()?,
        seed,
    };
    let balanced = balance_classes(&labeled, &pool, &balance)?;
    let per_class = balanced.len() / 3;
    let corpus: Vec<Tweet> = balanced.into_iter().map(|(t, _)| t).collect();

    let train_path = out_dir.join("train.jsonl");
    save_tweets(&train_path, &corpus)?;
    let report_path = out_dir.join("rule_report.tsv");
    save_rule_report(&report_path, &report)?;

    manifest.parameter("per_class", per_class);
    manifest.parameter("dual_stance_excluded", weak.dual.len());
    manifest.parameter("before_filters", before_filters);
    manifest.parameter("after_dedup", after_dedup);
    manifest.parameter("after_dictionary_filter", after_dictionary);
    manifest.output(&train_path)?;
    manifest.output(&report_path)?;
    manifest.save(out_dir.join("harvest_manifest.json"))?;

    println!(
        "harvest: {} labeled, {} dual-stance excluded, {} per class -> {}",
        weak.labeled.len(),
        weak.dual.len(),
        per_class,
        train_path.display()
    );
    Ok(())
}

/// Filter, normalize, and parse-attach a tweet file.
///
/// Writes `<stem>.clean.jsonl`, `<stem>.parses.tsv`, and
/// `preprocess_manifest.json`.
pub fn cmd_preprocess(
    ctx: &CommandContext,
    topic: &str,
    input: Option<&Path>,
    out_dir: &Path,
) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let mut manifest = ctx.manifest("preprocess", topic, tc.seed);
    ensure_out_dir(out_dir)?;

    let input = match input {
        Some(path) => path,
        None => required(&tc.train, "train tweets")?,
    };
    manifest.input(input)?;
    let tweets = load_tweets(input)?;
    let dictionary = load_dictionary(&ctx.config.resources, &mut manifest)?;
    let normalizer = load_normalizer(&ctx.config.resources, &mut manifest)?;

    let before = tweets.len();
    let deduped = filter_duplicates(tweets);
    let kept = filter_min_dictionary(deduped, &dictionary)?;
    let parses = match &tc.parses {
        Some(path) => {
            manifest.input(path)?;
            load_parses(path)?
        }
        None => BTreeMap::new(),
    };
    let attached = attach_parses(&kept, &parses, &normalizer);
    let fallbacks = attached.iter().filter(|p| p.fallback).count();

    let stem = stem_of(input);
    let clean_path = out_dir.join(format!("{stem}.clean.jsonl"));
    save_tweets(&clean_path, &kept)?;
    let parse_map: BTreeMap<String, Parse> = attached
        .iter()
        .map(|p| {
            (
                p.tweet.id.clone(),
                Parse {
                    tokens: p.tokens.clone(),
                    arcs: p.arcs.clone(),
                },
            )
        })
        .collect();
    let parses_path = out_dir.join(format!("{stem}.parses.tsv"));
    save_parses(&parses_path, &parse_map)?;

    manifest.parameter("input_tweets", before);
    manifest.parameter("kept_tweets", kept.len());
    manifest.parameter("fallback_parses", fallbacks);
    manifest.output(&clean_path)?;
    manifest.output(&parses_path)?;
    manifest.save(out_dir.join("preprocess_manifest.json"))?;

    println!(
        "preprocess: kept {}/{} tweets ({} fallback parses) -> {}",
        kept.len(),
        before,
        fallbacks,
        clean_path.display()
    );
    Ok(())
}

/// Build the topic-association model from the configured corpus.
///
/// Writes `pmi_model.tsv` and `pmi_manifest.json`.
pub fn cmd_pmi_build(ctx: &CommandContext, topic: &str, out_dir: &Path) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let mut manifest = ctx.manifest("pmi-build", topic, tc.seed);
    ensure_out_dir(out_dir)?;

    let corpus_path = required(&tc.pmi_corpus, "pmi corpus")?;
    manifest.input(corpus_path)?;
    let corpus = load_pmi_corpus(corpus_path)?;
    let normalizer = load_normalizer(&ctx.config.resources, &mut manifest)?;
    let documents: Vec<(String, Vec<String>)> = corpus
        .into_iter()
        .map(|(doc_topic, text)| {
            let tokens = normalizer
                .token_stream(&text)
                .into_iter()
                .map(|t| t.normalized.to_lowercase())
                .collect();
            (doc_topic, tokens)
        })
        .collect();
    let model = build_pmi_model(&documents, topic, tc.pmi_top_percent, tc.pmi_min_df)?;

    let model_path = out_dir.join("pmi_model.tsv");
    model.save(&model_path)?;
    manifest.parameter("top_percent", tc.pmi_top_percent);
    manifest.parameter("min_df", tc.pmi_min_df);
    manifest.parameter("table_size", model.table().len());
    manifest.parameter("pool_size", model.pool().len());
    manifest.output(&model_path)?;
    manifest.save(out_dir.join("pmi_manifest.json"))?;

    println!(
        "pmi-build: {} n-grams, pool {} -> {}",
        model.table().len(),
        model.pool().len(),
        model_path.display()
    );
    Ok(())
}

/// Extract features for a tweet file into `<stem>.features.tsv` plus
/// `<stem>.features.manifest.json`.
pub fn cmd_featurize(
    ctx: &CommandContext,
    topic: &str,
    input: Option<&Path>,
    out_dir: &Path,
    strip_hashtags: bool,
) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let mut manifest = ctx.manifest("featurize", topic, tc.seed);
    ensure_out_dir(out_dir)?;

    let input = match input {
        Some(path) => path,
        None => required(&tc.train, "train corpus")?,
    };

    let mut feature_config = tc.feature_config()?;
    if strip_hashtags {
        feature_config.strip_hashtags = true;
    }
    let normalizer = load_normalizer(&ctx.config.resources, &mut manifest)?;
    let parsed = load_attached(input, tc, &normalizer, &mut manifest)?;
    let resources = load_feature_resources(
        &ctx.config.resources,
        tc,
        topic,
        &feature_config.families,
        &mut manifest,
    )?;
    let vectors = featurize_corpus(&parsed, &feature_config, &resources.as_refs())?;
    let rows: Vec<FeatureRow> = parsed
        .iter()
        .zip(vectors)
        .map(|(p, features)| FeatureRow {
            id: p.tweet.id.clone(),
            label: p.tweet.stance,
            features,
        })
        .collect();

    let stem = stem_of(input);
    let features_path = out_dir.join(format!("{stem}.features.tsv"));
    save_features(&features_path, &rows)?;
    manifest.parameter("families", feature_config_summary(&feature_config));
    manifest.parameter("strip_hashtags", feature_config.strip_hashtags);
    manifest.parameter("tweets", rows.len());
    manifest.output(&features_path)?;
    manifest.save(out_dir.join(format!("{stem}.features.manifest.json")))?;

    println!("featurize: {} tweets -> {}", rows.len(), features_path.display());
    Ok(())
}

fn feature_config_summary(config: &FeatureConfig) -> String {
    config
        .families
        .iter()
        .map(|f| f.name())
        .collect::<Vec<_>>()
        .join(",")
}

fn labeled_rows(rows: Vec<FeatureRow>) -> Result<Vec<(crate::features::FeatureVector, StanceLabel)>> {
    rows.into_iter()
        .map(|row| {
            let label = row.label.ok_or_else(|| {
                Error::param("gold labels", format!("tweet {} has no stance", row.id))
            })?;
            Ok((row.features, label))
        })
        .collect()
}

/// Train a model from a feature file.
///
/// Writes `model.tsv`, `selection.tsv` when a ranking method is configured,
/// and `train_manifest.json`.
pub fn cmd_train(ctx: &CommandContext, topic: &str, features: &Path, out_dir: &Path) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let mut manifest = ctx.manifest("train", topic, tc.seed);
    ensure_out_dir(out_dir)?;

    manifest.input(features)?;
    let examples = labeled_rows(load_features(features)?)?;
    let method = tc.selection_method()?;
    let training = match method {
        SelectionMethod::None => examples,
        _ => {
            let report = rank_features(&examples, method)?;
            let selection_path = out_dir.join("selection.tsv");
            report.save(&selection_path)?;
            manifest.output(&selection_path)?;
            select_features(&examples, &report, tc.selection_k)?
        }
    };
    let model = train_nb(&training, tc.alpha)?;
    let model_path = out_dir.join("model.tsv");
    model.save(&model_path)?;

    manifest.parameter("alpha", tc.alpha);
    manifest.parameter("selection", method);
    manifest.parameter("selection_k", tc.selection_k);
    manifest.parameter("train_size", training.len());
    manifest.parameter("vocabulary", model.vocabulary().len());
    manifest.output(&model_path)?;
    manifest.save(out_dir.join("train_manifest.json"))?;

    println!(
        "train: {} examples, {} features -> {}",
        training.len(),
        model.vocabulary().len(),
        model_path.display()
    );
    Ok(())
}

/// Where the predictions scored by [`cmd_evaluate`] come from.
pub enum EvalSource<'a> {
    /// Predict a feature file with a saved model.
    ModelFeatures { model: &'a Path, features: &'a Path },
    /// Read finished `id<TAB>predicted<TAB>gold` rows.
    Pairs { pairs: &'a Path },
}

fn load_pairs(path: &Path) -> Result<(Vec<StanceLabel>, Vec<StanceLabel>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [_, p, g] = fields.as_slice() else {
            return Err(Error::malformed(path, idx + 1, "expected id<TAB>predicted<TAB>gold"));
        };
        pred.push(p.parse().map_err(|e: Error| Error::malformed(path, idx + 1, e.to_string()))?);
        gold.push(g.parse().map_err(|e: Error| Error::malformed(path, idx + 1, e.to_string()))?);
    }
    Ok((gold, pred))
}

fn print_report(report: &EvalReport) {
    for label in StanceLabel::ALL {
        let m = report.per_class[&label];
        println!(
            "{label}: precision {:.4} recall {:.4} f1 {:.4}",
            m.precision, m.recall, m.f1
        );
    }
    println!("semeval_avg: {:.4}", report.semeval_avg);
}

/// Score predictions and write `report.csv` plus `evaluate_manifest.json`.
pub fn cmd_evaluate(
    ctx: &CommandContext,
    topic: &str,
    source: EvalSource<'_>,
    out_dir: &Path,
    config_name: Option<&str>,
) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let mut manifest = ctx.manifest("evaluate", topic, tc.seed);
    ensure_out_dir(out_dir)?;

    let (gold, pred, train_size) = match source {
        EvalSource::ModelFeatures { model, features } => {
            manifest.input(model)?;
            manifest.input(features)?;
            let model = NbModel::load(model)?;
            let rows = labeled_rows(load_features(features)?)?;
            let gold: Vec<StanceLabel> = rows.iter().map(|(_, l)| *l).collect();
            let pred: Vec<StanceLabel> = rows.iter().map(|(fv, _)| model.predict(fv)).collect();
            (gold, pred, 0)
        }
        EvalSource::Pairs { pairs } => {
            manifest.input(pairs)?;
            let (gold, pred) = load_pairs(pairs)?;
            (gold, pred, 0)
        }
    };
    let report = evaluate(&gold, &pred)?;
    let row = ReportRow::from_report(
        topic,
        config_name.unwrap_or("evaluate"),
        &report,
        train_size,
        tc.seed,
        tc.strip_hashtags,
    );
    let report_path = out_dir.join("report.csv");
    save_report_csv(&report_path, &[row])?;
    manifest.parameter("test_size", gold.len());
    manifest.output(&report_path)?;
    manifest.save(out_dir.join("evaluate_manifest.json"))?;

    print_report(&report);
    println!("evaluate: {} pairs -> {}", gold.len(), report_path.display());
    Ok(())
}

/// The feature-family groups scored when no explicit list is given: word
/// n-grams, all dependency variants, tag n-grams, category counts, and the
/// association features.
pub fn default_ablation_subsets() -> Vec<(String, BTreeSet<FeatureFamily>)> {
    vec![
        (
            "ngram".to_string(),
            BTreeSet::from([FeatureFamily::Unigram, FeatureFamily::Bigram]),
        ),
        (
            "dependencies".to_string(),
            BTreeSet::from([FeatureFamily::Dep, FeatureFamily::LiwcDep, FeatureFamily::OpinionDep]),
        ),
        (
            "pos_ngram".to_string(),
            BTreeSet::from([FeatureFamily::PosBigram, FeatureFamily::PosTrigram]),
        ),
        ("liwc".to_string(), BTreeSet::from([FeatureFamily::Liwc])),
        (
            "pmi".to_string(),
            BTreeSet::from([FeatureFamily::PmiCount, FeatureFamily::PmiMax, FeatureFamily::PmiInTopic]),
        ),
    ]
}

/// Parse `--families` syntax: subsets split on `;`, family names on `,`.
pub fn parse_family_subsets(spec: &str) -> Result<Vec<(String, BTreeSet<FeatureFamily>)>> {
    let mut subsets = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            return Err(Error::param("families", "empty subset in list"));
        }
        let mut families = BTreeSet::new();
        for name in part.split(',') {
            families.insert(name.trim().parse::<FeatureFamily>()?);
        }
        let name = families.iter().map(|f| f.name()).collect::<Vec<_>>().join("+");
        subsets.push((name, families));
    }
    Ok(subsets)
}

fn union_families(subsets: &[(String, BTreeSet<FeatureFamily>)]) -> BTreeSet<FeatureFamily> {
    subsets.iter().flat_map(|(_, f)| f.iter().copied()).collect()
}

/// The feature count handed to selection: ranking methods use the
/// configured k, method `none` passes no count at all.
fn selection_k_for(method: SelectionMethod, k: usize) -> Option<usize> {
    match method {
        SelectionMethod::None => None,
        _ => Some(k),
    }
}

/// Score feature-family subsets on the configured train/test split.
///
/// Writes `ablation.csv` and `ablate_manifest.json`.
pub fn cmd_ablate(
    ctx: &CommandContext,
    topic: &str,
    out_dir: &Path,
    families_spec: Option<&str>,
    seed_override: Option<u64>,
    strip_hashtags: bool,
) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let seed = seed_override.unwrap_or(tc.seed);
    let mut manifest = ctx.manifest("ablate", topic, seed);
    ensure_out_dir(out_dir)?;

    let subsets = match families_spec {
        Some(spec) => parse_family_subsets(spec)?,
        None => default_ablation_subsets(),
    };
    let mut base = tc.feature_config()?;
    if strip_hashtags {
        base.strip_hashtags = true;
    }
    let normalizer = load_normalizer(&ctx.config.resources, &mut manifest)?;
    let train = load_attached(required(&tc.train, "train tweets")?, tc, &normalizer, &mut manifest)?;
    let test = load_attached(required(&tc.test, "test tweets")?, tc, &normalizer, &mut manifest)?;
    let resources = load_feature_resources(
        &ctx.config.resources,
        tc,
        topic,
        &union_families(&subsets),
        &mut manifest,
    )?;
    let method = tc.selection_method()?;
    let k = selection_k_for(method, tc.selection_k);
    let rows = run_ablation(
        &train,
        &test,
        &base,
        &resources.as_refs(),
        &subsets,
        tc.alpha,
        method,
        k,
    )?;
    let report_rows: Vec<ReportRow> = rows
        .iter()
        .map(|row| {
            ReportRow::from_report(topic, &row.name, &row.report, train.len(), seed, base.strip_hashtags)
        })
        .collect();

    let csv_path = out_dir.join("ablation.csv");
    save_report_csv(&csv_path, &report_rows)?;
    manifest.parameter("subsets", subsets.len());
    manifest.parameter("strip_hashtags", base.strip_hashtags);
    manifest.parameter("alpha", tc.alpha);
    manifest.output(&csv_path)?;
    manifest.save(out_dir.join("ablate_manifest.json"))?;

    for row in &rows {
        println!("ablate {}: semeval_avg {:.4}", row.name, row.report.semeval_avg);
    }
    println!("ablate: {} subsets -> {}", rows.len(), csv_path.display());
    Ok(())
}

/// The three standard curve configurations: unigrams, plain dependency arcs,
/// and the topic's configured best model.
fn curve_configs(tc: &TopicConfig, strip_hashtags: bool) -> Result<Vec<(String, FeatureConfig)>> {
    let mut best = tc.feature_config()?;
    if strip_hashtags {
        best.strip_hashtags = true;
    }
    let single = |family| FeatureConfig {
        families: BTreeSet::from([family]),
        use_stemmed: best.use_stemmed,
        use_unstemmed: best.use_unstemmed,
        strip_hashtags: best.strip_hashtags,
    };
    Ok(vec![
        ("unigram".to_string(), single(FeatureFamily::Unigram)),
        ("dep".to_string(), single(FeatureFamily::Dep)),
        ("best".to_string(), best),
    ])
}

/// Measure learning curves over nested training prefixes.
///
/// Writes `curve.csv` and `curve_manifest.json`.
pub fn cmd_curve(
    ctx: &CommandContext,
    topic: &str,
    out_dir: &Path,
    sizes: &[usize],
    seed_override: Option<u64>,
    strip_hashtags: bool,
) -> Result<()> {
    let tc = ctx.config.topic(topic)?;
    let seed = seed_override.unwrap_or(tc.seed);
    let mut manifest = ctx.manifest("curve", topic, seed);
    ensure_out_dir(out_dir)?;

    let configs = curve_configs(tc, strip_hashtags)?;
    let families = configs.iter().flat_map(|(_, c)| c.families.iter().copied()).collect();
    let normalizer = load_normalizer(&ctx.config.resources, &mut manifest)?;
    let train = load_attached(required(&tc.train, "train tweets")?, tc, &normalizer, &mut manifest)?;
    let test = load_attached(required(&tc.test, "test tweets")?, tc, &normalizer, &mut manifest)?;
    let resources =
        load_feature_resources(&ctx.config.resources, tc, topic, &families, &mut manifest)?;
    let method = tc.selection_method()?;
    let k = selection_k_for(method, tc.selection_k);
    let points = learning_curve(
        &train,
        &test,
        &configs,
        &resources.as_refs(),
        sizes,
        seed,
        tc.alpha,
        method,
        k,
    )?;
    let rows: Vec<ReportRow> = points
        .iter()
        .map(|p| {
            ReportRow::from_report(
                topic,
                &p.config,
                &p.report,
                p.train_size,
                p.seed,
                configs
                    .iter()
                    .find(|(name, _)| *name == p.config)
                    .map(|(_, c)| c.strip_hashtags)
                    .unwrap_or(false),
            )
        })
        .collect();

    let csv_path = out_dir.join("curve.csv");
    save_report_csv(&csv_path, &rows)?;
    manifest.parameter(
        "sizes",
        sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
    );
    manifest.parameter("alpha", tc.alpha);
    manifest.output(&csv_path)?;
    manifest.save(out_dir.join("curve_manifest.json"))?;

    for point in &points {
        println!(
            "curve {} @ {}: semeval_avg {:.4}",
            point.config, point.train_size, point.semeval_avg
        );
    }
    println!("curve: {} points -> {}", points.len(), csv_path.display());
    Ok(())
}

/// Train on the configured split and evaluate in one step — convenience used
/// by tests and quick experiments rather than a CLI subcommand.
pub fn train_and_evaluate(
    ctx: &CommandContext,
    topic: &str,
    strip_hashtags: bool,
) -> Result<EvalReport> {
    let tc = ctx.config.topic(topic)?;
    let mut manifest = ctx.manifest("train-evaluate", topic, tc.seed);
    let mut feature_config = tc.feature_config()?;
    if strip_hashtags {
        feature_config.strip_hashtags = true;
    }
    let normalizer = load_normalizer(&ctx.config.resources, &mut manifest)?;
    let train = load_attached(required(&tc.train, "train tweets")?, tc, &normalizer, &mut manifest)?;
    let test = load_attached(required(&tc.test, "test tweets")?, tc, &normalizer, &mut manifest)?;
    let resources = load_feature_resources(
        &ctx.config.resources,
        tc,
        topic,
        &feature_config.families,
        &mut manifest,
    )?;
    let refs = resources.as_refs();
    let train_examples =
        crate::eval::labeled_examples(&train, featurize_corpus(&train, &feature_config, &refs)?)?;
    let test_examples =
        crate::eval::labeled_examples(&test, featurize_corpus(&test, &feature_config, &refs)?)?;
    let method = tc.selection_method()?;
    let k = selection_k_for(method, tc.selection_k);
    let outcome = train_eval_once(&train_examples, &test_examples, tc.alpha, method, k)?;
    Ok(outcome.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_subset_spec_parses_and_names_subsets() {
        let subsets = parse_family_subsets("unigram,bigram; dep").unwrap();
        assert_eq!(subsets.len(), 2);
        assert_eq!(subsets[0].0, "unigram+bigram");
        assert_eq!(
            subsets[0].1,
            BTreeSet::from([FeatureFamily::Unigram, FeatureFamily::Bigram])
        );
        assert_eq!(subsets[1].0, "dep");
        assert!(parse_family_subsets("unigram;;dep").is_err());
        assert!(parse_family_subsets("nope").is_err());
    }

    #[test]
    fn default_subsets_cover_every_family_once() {
        let subsets = default_ablation_subsets();
        assert_eq!(subsets.len(), 5);
        let union = union_families(&subsets);
        assert_eq!(union.len(), FeatureFamily::ALL.len());
        let total: usize = subsets.iter().map(|(_, f)| f.len()).sum();
        assert_eq!(total, FeatureFamily::ALL.len(), "subsets are disjoint");
    }
}
