//! Supervised feature ranking and top-k selection.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::corpus::StanceLabel;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// How to rank features before training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMethod {
    /// Keep every feature.
    #[default]
    None,
    /// Max over classes of |Pearson r| against a one-vs-rest indicator.
    Correlation,
    /// Information gain over presence, normalized by the split entropy.
    GainRatio,
}

impl SelectionMethod {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMethod::None => "none",
            SelectionMethod::Correlation => "correlation",
            SelectionMethod::GainRatio => "gain_ratio",
        }
    }
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SelectionMethod::None),
            "correlation" => Ok(SelectionMethod::Correlation),
            "gain_ratio" => Ok(SelectionMethod::GainRatio),
            other => Err(Error::param(
                "selection method",
                format!("unknown method {other:?} (expected none, correlation, or gain_ratio)"),
            )),
        }
    }
}

/// One feature with its ranking score.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub name: String,
    pub score: f64,
}

/// All features ranked best-first; ties are broken by name so the ranking is
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub method: SelectionMethod,
    pub ranked: Vec<RankedFeature>,
}

impl SelectionReport {
    /// Names of the `k` best features (all of them when fewer exist).
    pub fn top_k(&self, k: usize) -> Result<HashSet<String>> {
        if k == 0 {
            return Err(Error::param("selection k", "must be at least 1"));
        }
        Ok(self
            .ranked
            .iter()
            .take(k)
            .map(|r| r.name.clone())
            .collect())
    }

    /// Write the ranking as TSV (`# method=` header, then name and score).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# method={}", self.method).map_err(|e| Error::io(path, e))?;
        for feature in &self.ranked {
            writeln!(w, "{}\t{:.16e}", feature.name, feature.score).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

fn check_examples(examples: &[(FeatureVector, StanceLabel)]) -> Result<BTreeSet<String>> {
    if examples.len() < 2 {
        return Err(Error::EmptyInput {
            what: "feature ranking needs at least two examples".into(),
        });
    }
    let classes: BTreeSet<StanceLabel> = examples.iter().map(|(_, l)| *l).collect();
    if classes.len() < 2 {
        return Err(Error::TooFewClasses { found: classes.len() });
    }
    Ok(examples
        .iter()
        .flat_map(|(fv, _)| fv.names().map(str::to_string))
        .collect())
}

fn sort_ranked(mut ranked: Vec<RankedFeature>) -> Vec<RankedFeature> {
    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("ranking scores are finite")
            .then_with(|| a.name.cmp(&b.name))
    });
    ranked
}

/// Pearson correlation of two equal-length vectors; zero when either side is
/// constant.
fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

/// Rank features by the strongest absolute Pearson correlation between the
/// feature's value vector and any class's one-vs-rest indicator.
pub fn rank_by_correlation(examples: &[(FeatureVector, StanceLabel)]) -> Result<SelectionReport> {
    let vocabulary = check_examples(examples)?;
    let classes: BTreeSet<StanceLabel> = examples.iter().map(|(_, l)| *l).collect();
    let indicators: Vec<Vec<f64>> = classes
        .iter()
        .map(|c| {
            examples
                .iter()
                .map(|(_, l)| if l == c { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let ranked = vocabulary
        .into_iter()
        .map(|name| {
            let x: Vec<f64> = examples.iter().map(|(fv, _)| fv.get(&name)).collect();
            let score = indicators
                .iter()
                .map(|y| pearson(&x, y).abs())
                .fold(0.0, f64::max);
            RankedFeature { name, score }
        })
        .collect();
    Ok(SelectionReport {
        method: SelectionMethod::Correlation,
        ranked: sort_ranked(ranked),
    })
}

/// Shannon entropy in bits of a count distribution.
fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Rank features by gain ratio of the class distribution against the
/// feature's presence/absence split. Features whose split is degenerate
/// (always present or always absent) score zero.
pub fn rank_by_gain_ratio(examples: &[(FeatureVector, StanceLabel)]) -> Result<SelectionReport> {
    let vocabulary = check_examples(examples)?;
    let classes: Vec<StanceLabel> = examples
        .iter()
        .map(|(_, l)| *l)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let class_index = |label: StanceLabel| {
        classes
            .iter()
            .position(|c| *c == label)
            .expect("label drawn from the class set")
    };
    let mut class_counts = vec![0usize; classes.len()];
    for (_, label) in examples {
        class_counts[class_index(*label)] += 1;
    }
    let class_entropy = entropy(&class_counts);
    let n = examples.len() as f64;

    let ranked = vocabulary
        .into_iter()
        .map(|name| {
            let mut present = vec![0usize; classes.len()];
            let mut absent = vec![0usize; classes.len()];
            for (fv, label) in examples {
                if fv.contains(&name) {
                    present[class_index(*label)] += 1;
                } else {
                    absent[class_index(*label)] += 1;
                }
            }
            let n_present: usize = present.iter().sum();
            let n_absent: usize = absent.iter().sum();
            let split_entropy = entropy(&[n_present, n_absent]);
            let score = if split_entropy == 0.0 {
                0.0
            } else {
                let conditional = (n_present as f64 / n) * entropy(&present)
                    + (n_absent as f64 / n) * entropy(&absent);
                (class_entropy - conditional) / split_entropy
            };
            RankedFeature { name, score }
        })
        .collect();
    Ok(SelectionReport {
        method: SelectionMethod::GainRatio,
        ranked: sort_ranked(ranked),
    })
}

/// Rank with the requested method. [`SelectionMethod::None`] has no ranking;
/// callers skip selection instead.
pub fn rank_features(
    examples: &[(FeatureVector, StanceLabel)],
    method: SelectionMethod,
) -> Result<SelectionReport> {
    match method {
        SelectionMethod::None => Err(Error::param(
            "selection method",
            "method none does not rank features",
        )),
        SelectionMethod::Correlation => rank_by_correlation(examples),
        SelectionMethod::GainRatio => rank_by_gain_ratio(examples),
    }
}

/// Restrict every example to the `k` best features of `report`.
pub fn select_features(
    examples: &[(FeatureVector, StanceLabel)],
    report: &SelectionReport,
    k: usize,
) -> Result<Vec<(FeatureVector, StanceLabel)>> {
    let keep = report.top_k(k)?;
    Ok(examples
        .iter()
        .map(|(fv, label)| {
            let mut fv = fv.clone();
            fv.retain_names(&keep);
            (fv, *label)
        })
        .collect())
}
