//! Evaluation metrics, train/test runs, ablations, and learning curves.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ParsedTweet, StanceLabel};
use crate::error::{Error, Result};
use crate::features::{featurize_corpus, FeatureConfig, FeatureFamily, FeatureResources, FeatureVector};
use crate::model::{train_nb, NbModel};
use crate::selection::{rank_features, select_features, SelectionMethod, SelectionReport};

/// Precision, recall, and F1 for one class. Undefined ratios (0/0) are 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Full evaluation of a prediction run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `confusion[gold][pred]` in canonical label order.
    pub confusion: [[usize; 3]; 3],
    pub per_class: BTreeMap<StanceLabel, ClassMetrics>,
    /// Mean of the FAVOR and AGAINST F1 scores.
    pub semeval_avg: f64,
}

impl EvalReport {
    pub fn f1(&self, label: StanceLabel) -> f64 {
        self.per_class[&label].f1
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Score predictions against gold labels.
pub fn evaluate(gold: &[StanceLabel], pred: &[StanceLabel]) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: gold.len(),
            right: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyInput {
            what: "evaluation pairs".into(),
        });
    }
    let mut confusion = [[0usize; 3]; 3];
    for (g, p) in gold.iter().zip(pred) {
        confusion[g.index()][p.index()] += 1;
    }
    let mut per_class = BTreeMap::new();
    for label in StanceLabel::ALL {
        let i = label.index();
        let tp = confusion[i][i];
        let predicted: usize = (0..3).map(|g| confusion[g][i]).sum();
        let actual: usize = confusion[i].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.insert(label, ClassMetrics { precision, recall, f1 });
    }
    let semeval_avg =
        (per_class[&StanceLabel::Favor].f1 + per_class[&StanceLabel::Against].f1) / 2.0;
    Ok(EvalReport {
        confusion,
        per_class,
        semeval_avg,
    })
}

/// Pair featurized rows with the gold stance of the underlying tweets.
/// Every tweet must carry a stance.
pub fn labeled_examples(
    parsed: &[ParsedTweet],
    features: Vec<FeatureVector>,
) -> Result<Vec<(FeatureVector, StanceLabel)>> {
    if parsed.len() != features.len() {
        return Err(Error::LengthMismatch {
            left: parsed.len(),
            right: features.len(),
        });
    }
    parsed
        .iter()
        .zip(features)
        .map(|(p, fv)| {
            let stance = p.tweet.stance.ok_or_else(|| {
                Error::param("gold labels", format!("tweet {} has no stance", p.tweet.id))
            })?;
            Ok((fv, stance))
        })
        .collect()
}

/// A trained model together with its test-set evaluation.
#[derive(Debug, Clone)]
pub struct TrainEvalOutcome {
    pub model: NbModel,
    pub report: EvalReport,
    /// Present when a selection method ranked the training features.
    pub selection: Option<SelectionReport>,
}

/// Train on `train` (optionally restricted to the top `k` features under
/// `method`), then evaluate on `test`. Selection only restricts the model's
/// training vocabulary; test vectors are left intact because prediction
/// ignores non-vocabulary features anyway.
pub fn train_eval_once(
    train: &[(FeatureVector, StanceLabel)],
    test: &[(FeatureVector, StanceLabel)],
    alpha: f64,
    method: SelectionMethod,
    k: Option<usize>,
) -> Result<TrainEvalOutcome> {
    let (examples, selection) = match method {
        SelectionMethod::None => (train.to_vec(), None),
        _ => {
            let k = k.ok_or_else(|| {
                Error::param("selection k", format!("method {method} needs a feature count"))
            })?;
            let report = rank_features(train, method)?;
            let selected = select_features(train, &report, k)?;
            (selected, Some(report))
        }
    };
    let model = train_nb(&examples, alpha)?;
    let gold: Vec<StanceLabel> = test.iter().map(|(_, l)| *l).collect();
    let pred: Vec<StanceLabel> = test.iter().map(|(fv, _)| model.predict(fv)).collect();
    let report = evaluate(&gold, &pred)?;
    Ok(TrainEvalOutcome {
        model,
        report,
        selection,
    })
}

/// One named feature-family subset scored on the shared train/test split.
#[derive(Debug, Clone)]
pub struct AblationRow {
    pub name: String,
    pub families: BTreeSet<FeatureFamily>,
    pub report: EvalReport,
}

/// Featurize and score each family subset against the same split. Every
/// subset inherits `base` (stemming flags, hashtag stripping) and replaces
/// only the family set.
#[allow(clippy::too_many_arguments)]
pub fn run_ablation(
    train: &[ParsedTweet],
    test: &[ParsedTweet],
    base: &FeatureConfig,
    resources: &FeatureResources<'_>,
    subsets: &[(String, BTreeSet<FeatureFamily>)],
    alpha: f64,
    method: SelectionMethod,
    k: Option<usize>,
) -> Result<Vec<AblationRow>> {
    if subsets.is_empty() {
        return Err(Error::EmptyInput {
            what: "ablation subsets".into(),
        });
    }
    let mut seen = BTreeSet::new();
    for (name, _) in subsets {
        if !seen.insert(name.as_str()) {
            return Err(Error::param("ablation subsets", format!("duplicate name {name:?}")));
        }
    }
    subsets
        .iter()
        .map(|(name, families)| {
            let mut config = base.clone();
            config.families = families.clone();
            let train_examples =
                labeled_examples(train, featurize_corpus(train, &config, resources)?)?;
            let test_examples =
                labeled_examples(test, featurize_corpus(test, &config, resources)?)?;
            let outcome = train_eval_once(&train_examples, &test_examples, alpha, method, k)?;
            Ok(AblationRow {
                name: name.clone(),
                families: families.clone(),
                report: outcome.report,
            })
        })
        .collect()
}

/// One measurement on a learning curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub config: String,
    pub train_size: usize,
    pub semeval_avg: f64,
    pub seed: u64,
    /// Full evaluation behind `semeval_avg`.
    pub report: EvalReport,
}

fn check_sizes(sizes: &[usize], available: usize) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::EmptyInput {
            what: "curve sizes".into(),
        });
    }
    for window in sizes.windows(2) {
        if window[1] <= window[0] {
            return Err(Error::param(
                "curve sizes",
                format!("sizes must be strictly increasing, got {} after {}", window[1], window[0]),
            ));
        }
    }
    if sizes[0] == 0 {
        return Err(Error::param("curve sizes", "sizes must be positive"));
    }
    if *sizes.last().expect("nonempty") > available {
        return Err(Error::param(
            "curve sizes",
            format!(
                "largest size {} exceeds the {available} training tweets",
                sizes.last().expect("nonempty")
            ),
        ));
    }
    Ok(())
}

/// Score nested training prefixes for several feature configurations.
///
/// The training set is shuffled once with a seeded generator; the size-`s`
/// subset is the first `s` tweets of that single shuffle, so smaller sets
/// are strict subsets of larger ones and every configuration sees the same
/// data at the same size.
#[allow(clippy::too_many_arguments)]
pub fn learning_curve(
    train: &[ParsedTweet],
    test: &[ParsedTweet],
    configs: &[(String, FeatureConfig)],
    resources: &FeatureResources<'_>,
    sizes: &[usize],
    seed: u64,
    alpha: f64,
    method: SelectionMethod,
    k: Option<usize>,
) -> Result<Vec<CurvePoint>> {
    if configs.is_empty() {
        return Err(Error::EmptyInput {
            what: "curve configurations".into(),
        });
    }
    check_sizes(sizes, train.len())?;
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let shuffled: Vec<ParsedTweet> = order.iter().map(|&i| train[i].clone()).collect();

    let mut points = Vec::with_capacity(configs.len() * sizes.len());
    for (name, config) in configs {
        let train_examples =
            labeled_examples(&shuffled, featurize_corpus(&shuffled, config, resources)?)?;
        let test_examples = labeled_examples(test, featurize_corpus(test, config, resources)?)?;
        for &size in sizes {
            let outcome =
                train_eval_once(&train_examples[..size], &test_examples, alpha, method, k)?;
            points.push(CurvePoint {
                config: name.clone(),
                train_size: size,
                semeval_avg: outcome.report.semeval_avg,
                seed,
                report: outcome.report,
            });
        }
    }
    Ok(points)
}

/// One row of the run-report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub topic: String,
    pub config_name: String,
    pub favor_f: f64,
    pub against_f: f64,
    pub none_f: f64,
    pub semeval_avg: f64,
    pub train_size: usize,
    pub seed: u64,
    pub strip_hashtags: bool,
}

impl ReportRow {
    pub fn from_report(
        topic: &str,
        config_name: &str,
        report: &EvalReport,
        train_size: usize,
        seed: u64,
        strip_hashtags: bool,
    ) -> Self {
        ReportRow {
            topic: topic.to_string(),
            config_name: config_name.to_string(),
            favor_f: report.f1(StanceLabel::Favor),
            against_f: report.f1(StanceLabel::Against),
            none_f: report.f1(StanceLabel::None),
            semeval_avg: report.semeval_avg,
            train_size,
            seed,
            strip_hashtags,
        }
    }
}

/// Write report rows as CSV with a fixed header. Text columns must not
/// contain commas; scores use six decimal places.
pub fn save_report_csv(path: impl AsRef<Path>, rows: &[ReportRow]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(
        w,
        "topic,config_name,favor_f,against_f,none_f,semeval_avg,train_size,seed,strip_hashtags"
    )
    .map_err(|e| Error::io(path, e))?;
    for row in rows {
        for text in [&row.topic, &row.config_name] {
            if text.contains([',', '\n', '"']) {
                return Err(Error::param(
                    "report csv",
                    format!("{text:?} contains a csv delimiter"),
                ));
            }
        }
        writeln!(
            w,
            "{},{},{:.6},{:.6},{:.6},{:.6},{},{},{}",
            row.topic,
            row.config_name,
            row.favor_f,
            row.against_f,
            row.none_f,
            row.semeval_avg,
            row.train_size,
            row.seed,
            row.strip_hashtags
        )
        .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ArcHead, DepArc, Source, Token, Tweet};

    use StanceLabel::{Against, Favor, None as NoneLabel};

    #[test]
    fn mixed_confusion_matches_hand_computation() {
        // gold FAVOR x4 -> F,F,F,A; gold AGAINST x4 -> F,A,A,N;
        // gold NONE x2 -> F,N.
        let gold = [Favor, Favor, Favor, Favor, Against, Against, Against, Against, NoneLabel, NoneLabel];
        let pred = [Favor, Favor, Favor, Against, Favor, Against, Against, NoneLabel, Favor, NoneLabel];
        let report = evaluate(&gold, &pred).unwrap();
        assert_eq!(report.confusion, [[3, 1, 0], [1, 2, 1], [1, 0, 1]]);
        let tol = 1e-12;
        // P_F = 3/5, R_F = 3/4, F1_F = 2/3.
        let f = report.per_class[&Favor];
        assert!((f.precision - 0.6).abs() < tol);
        assert!((f.recall - 0.75).abs() < tol);
        assert!((f.f1 - 2.0 / 3.0).abs() < tol);
        // P_A = 2/3, R_A = 1/2, F1_A = 4/7.
        let a = report.per_class[&Against];
        assert!((a.f1 - 0.571_428_571_428_571_4).abs() < tol);
        // P_N = R_N = F1_N = 1/2.
        assert!((report.per_class[&NoneLabel].f1 - 0.5).abs() < tol);
        // semeval = (2/3 + 4/7) / 2 = 13/21.
        assert!((report.semeval_avg - 0.619_047_619_047_619_1).abs() < tol);
    }

    #[test]
    fn perfect_predictions_score_one() {
        let gold = [Favor, Against, NoneLabel, Favor];
        let report = evaluate(&gold, &gold).unwrap();
        for label in StanceLabel::ALL {
            assert_eq!(report.per_class[&label].f1, 1.0);
        }
        assert_eq!(report.semeval_avg, 1.0);
    }

    #[test]
    fn all_none_predictions_zero_the_semeval_average() {
        let gold = [Favor, Favor, Against, Against, NoneLabel, NoneLabel];
        let pred = [NoneLabel; 6];
        let report = evaluate(&gold, &pred).unwrap();
        assert_eq!(report.per_class[&Favor].f1, 0.0);
        assert_eq!(report.per_class[&Against].f1, 0.0);
        // NONE: precision 1/3, recall 1, F1 1/2 — irrelevant to the average.
        assert!((report.per_class[&NoneLabel].f1 - 0.5).abs() < 1e-12);
        assert_eq!(report.semeval_avg, 0.0);
    }

    #[test]
    fn fully_wrong_predictions_score_zero_without_dividing_by_zero() {
        let gold = [Favor, Against, NoneLabel];
        let pred = [Against, NoneLabel, Favor];
        let report = evaluate(&gold, &pred).unwrap();
        for label in StanceLabel::ALL {
            let m = report.per_class[&label];
            assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        }
        assert_eq!(report.semeval_avg, 0.0);
    }

    #[test]
    fn absent_class_yields_zero_metrics() {
        let gold = [Favor, Against];
        let pred = [Favor, Against];
        let report = evaluate(&gold, &pred).unwrap();
        assert_eq!(report.per_class[&NoneLabel], ClassMetrics::default());
        assert_eq!(report.semeval_avg, 1.0);
    }

    #[test]
    fn evaluate_rejects_bad_shapes() {
        assert!(matches!(
            evaluate(&[Favor], &[Favor, Against]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(evaluate(&[], &[]), Err(Error::EmptyInput { .. })));
    }

    fn fv(pairs: &[(&str, f64)]) -> FeatureVector {
        pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
    }

    #[test]
    fn train_eval_once_runs_with_and_without_selection() {
        let train = vec![
            (fv(&[("good", 2.0), ("noise", 1.0)]), Favor),
            (fv(&[("good", 1.0)]), Favor),
            (fv(&[("bad", 2.0)]), Against),
            (fv(&[("bad", 1.0), ("noise", 1.0)]), Against),
        ];
        let test = vec![
            (fv(&[("good", 1.0)]), Favor),
            (fv(&[("bad", 1.0)]), Against),
        ];
        let outcome =
            train_eval_once(&train, &test, 1.0, SelectionMethod::None, None).unwrap();
        assert_eq!(outcome.report.semeval_avg, 1.0);
        assert!(outcome.selection.is_none());

        let outcome =
            train_eval_once(&train, &test, 1.0, SelectionMethod::Correlation, Some(2)).unwrap();
        assert_eq!(outcome.report.semeval_avg, 1.0);
        let selection = outcome.selection.expect("ranked");
        assert_eq!(selection.ranked.len(), 3);
        // Selection restricted the model's vocabulary to the top 2.
        assert_eq!(outcome.model.vocabulary().len(), 2);
        assert!(!outcome.model.vocabulary().contains("noise"));

        // A ranking method without k is an error.
        assert!(train_eval_once(&train, &test, 1.0, SelectionMethod::GainRatio, None).is_err());
    }

    fn tiny_parsed(id: &str, words: &[&str], stance: StanceLabel) -> ParsedTweet {
        let tokens: Vec<Token> = words
            .iter()
            .enumerate()
            .map(|(i, w)| Token {
                index: i + 1,
                surface: w.to_string(),
                normalized: w.to_string(),
                pos: "WORD".to_string(),
            })
            .collect();
        let arcs: Vec<DepArc> = (1..=words.len())
            .map(|i| DepArc {
                head: if i == 1 { ArcHead::Root } else { ArcHead::Token(i - 1) },
                child: i,
            })
            .collect();
        ParsedTweet {
            tweet: Tweet {
                id: id.to_string(),
                text: words.join(" "),
                topic: "toy".to_string(),
                stance: Some(stance),
                source: Source::Harvested,
            },
            tokens,
            arcs,
            fallback: true,
        }
    }

    fn toy_split() -> (Vec<ParsedTweet>, Vec<ParsedTweet>) {
        let train = vec![
            tiny_parsed("tr1", &["great", "idea"], Favor),
            tiny_parsed("tr2", &["great", "plan"], Favor),
            tiny_parsed("tr3", &["awful", "idea"], Against),
            tiny_parsed("tr4", &["awful", "plan"], Against),
            tiny_parsed("tr5", &["weather", "today"], NoneLabel),
            tiny_parsed("tr6", &["lunch", "today"], NoneLabel),
        ];
        let test = vec![
            tiny_parsed("te1", &["great", "movie"], Favor),
            tiny_parsed("te2", &["awful", "movie"], Against),
            tiny_parsed("te3", &["rain", "today"], NoneLabel),
        ];
        (train, test)
    }

    #[test]
    fn ablation_scores_each_subset() {
        let (train, test) = toy_split();
        let mut base = FeatureConfig::with_families([FeatureFamily::Unigram]);
        base.use_stemmed = false;
        let subsets = vec![
            ("unigrams".to_string(), BTreeSet::from([FeatureFamily::Unigram])),
            (
                "unigrams_bigrams".to_string(),
                BTreeSet::from([FeatureFamily::Unigram, FeatureFamily::Bigram]),
            ),
        ];
        let rows = run_ablation(
            &train,
            &test,
            &base,
            &FeatureResources::default(),
            &subsets,
            1.0,
            SelectionMethod::None,
            None,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].name, "unigrams");
        assert_eq!(rows[0].report.semeval_avg, 1.0, "unigrams separate the toy data");
        assert_eq!(rows[1].report.semeval_avg, 1.0);

        let dup = vec![subsets[0].clone(), subsets[0].clone()];
        assert!(run_ablation(
            &train,
            &test,
            &base,
            &FeatureResources::default(),
            &dup,
            1.0,
            SelectionMethod::None,
            None,
        )
        .is_err());
    }

    #[test]
    fn learning_curve_uses_nested_prefixes_and_is_deterministic() {
        let (train, test) = toy_split();
        let mut cfg = FeatureConfig::with_families([FeatureFamily::Unigram]);
        cfg.use_stemmed = false;
        let configs = vec![("unigram".to_string(), cfg)];
        let sizes = [4, 6];
        let run = |seed: u64| {
            learning_curve(
                &train,
                &test,
                &configs,
                &FeatureResources::default(),
                &sizes,
                seed,
                1.0,
                SelectionMethod::None,
                None,
            )
        };
        // Any 4-prefix of a 2/2/2 class split holds at least two classes.
        let points = run(7).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].train_size, 4);
        assert_eq!(points[1].train_size, 6);
        assert_eq!(points[1].semeval_avg, 1.0, "full data separates the toy test");
        let again = run(7).unwrap();
        assert_eq!(points, again, "same seed, same curve");
    }

    #[test]
    fn learning_curve_validates_sizes() {
        let (train, test) = toy_split();
        let mut cfg = FeatureConfig::with_families([FeatureFamily::Unigram]);
        cfg.use_stemmed = false;
        let configs = vec![("unigram".to_string(), cfg)];
        let run = |sizes: &[usize]| {
            learning_curve(
                &train,
                &test,
                &configs,
                &FeatureResources::default(),
                sizes,
                0,
                1.0,
                SelectionMethod::None,
                None,
            )
        };
        assert!(run(&[]).is_err());
        assert!(run(&[0, 3]).is_err());
        assert!(run(&[3, 3]).is_err());
        assert!(run(&[4, 2]).is_err());
        assert!(run(&[4, 7]).is_err(), "size beyond the training set");
    }

    #[test]
    fn report_csv_has_header_and_fixed_columns() {
        let gold = [Favor, Against, NoneLabel];
        let report = evaluate(&gold, &gold).unwrap();
        let row = ReportRow::from_report("climate", "best", &report, 100, 42, true);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        save_report_csv(&path, &[row]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("topic,config_name,favor_f,against_f,none_f,semeval_avg,train_size,seed,strip_hashtags")
        );
        assert_eq!(
            lines.next(),
            Some("climate,best,1.000000,1.000000,1.000000,1.000000,100,42,true")
        );

        let bad = ReportRow {
            topic: "a,b".into(),
            ..ReportRow::from_report("t", "c", &report, 1, 0, false)
        };
        assert!(save_report_csv(&path, &[bad]).is_err());
    }
}
