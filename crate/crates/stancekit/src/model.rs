//! Multinomial Naive Bayes over sparse feature vectors.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::corpus::StanceLabel;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// A trained Multinomial Naive Bayes classifier.
///
/// Probabilities are kept as natural logs. Likelihoods use add-alpha
/// smoothing over the training vocabulary; features outside that vocabulary
/// are ignored at prediction time.
#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    alpha: f64,
    classes: Vec<StanceLabel>,
    log_prior: Vec<f64>,
    /// Per-class log likelihood for every vocabulary feature.
    log_likelihood: Vec<BTreeMap<String, f64>>,
    vocabulary: BTreeSet<String>,
}

impl NbModel {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Classes present in training, in canonical label order.
    pub fn classes(&self) -> &[StanceLabel] {
        &self.classes
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn log_prior(&self, label: StanceLabel) -> Option<f64> {
        let i = self.classes.iter().position(|c| *c == label)?;
        Some(self.log_prior[i])
    }

    pub fn log_likelihood(&self, label: StanceLabel, feature: &str) -> Option<f64> {
        let i = self.classes.iter().position(|c| *c == label)?;
        self.log_likelihood[i].get(feature).copied()
    }

    /// Unnormalized log joint score of each class for `features`, in
    /// [`classes`](Self::classes) order. Non-vocabulary features contribute
    /// nothing.
    pub fn scores(&self, features: &FeatureVector) -> Vec<f64> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let mut score = self.log_prior[i];
                for (name, value) in features.iter() {
                    if let Some(ll) = self.log_likelihood[i].get(name) {
                        score += value * ll;
                    }
                }
                score
            })
            .collect()
    }

    /// Highest scoring class; ties break toward canonical label order.
    pub fn predict(&self, features: &FeatureVector) -> StanceLabel {
        let scores = self.scores(features);
        let mut best = 0;
        for (i, score) in scores.iter().enumerate().skip(1) {
            if *score > scores[best] {
                best = i;
            }
        }
        self.classes[best]
    }

    pub fn predict_all(&self, rows: &[FeatureVector]) -> Vec<StanceLabel> {
        rows.iter().map(|fv| self.predict(fv)).collect()
    }

    /// Write the model as TSV. Floats are serialized with 17 significant
    /// digits so a reload reproduces the model bit for bit.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# alpha={:.16e}", self.alpha).map_err(|e| Error::io(path, e))?;
        for (i, class) in self.classes.iter().enumerate() {
            writeln!(w, "prior\t{}\t{:.16e}", class, self.log_prior[i])
                .map_err(|e| Error::io(path, e))?;
        }
        for (i, class) in self.classes.iter().enumerate() {
            for (name, ll) in &self.log_likelihood[i] {
                writeln!(w, "feature\t{class}\t{name}\t{ll:.16e}").map_err(|e| Error::io(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Read a model written by [`save`](Self::save).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut alpha = None;
        let mut priors: BTreeMap<StanceLabel, f64> = BTreeMap::new();
        let mut likelihoods: BTreeMap<StanceLabel, BTreeMap<String, f64>> = BTreeMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# alpha=") {
                let value: f64 = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::malformed(path, lineno, "bad alpha"))?;
                alpha = Some(value);
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["prior", class, value] => {
                    let class: StanceLabel = class
                        .parse()
                        .map_err(|e: Error| Error::malformed(path, lineno, e.to_string()))?;
                    let value: f64 = value
                        .parse()
                        .map_err(|_| Error::malformed(path, lineno, "bad prior"))?;
                    if priors.insert(class, value).is_some() {
                        return Err(Error::malformed(path, lineno, format!("duplicate prior for {class}")));
                    }
                }
                ["feature", class, name, value] => {
                    let class: StanceLabel = class
                        .parse()
                        .map_err(|e: Error| Error::malformed(path, lineno, e.to_string()))?;
                    let value: f64 = value
                        .parse()
                        .map_err(|_| Error::malformed(path, lineno, "bad likelihood"))?;
                    if name.is_empty() {
                        return Err(Error::malformed(path, lineno, "empty feature name"));
                    }
                    if likelihoods
                        .entry(class)
                        .or_default()
                        .insert(name.to_string(), value)
                        .is_some()
                    {
                        return Err(Error::malformed(
                            path,
                            lineno,
                            format!("duplicate likelihood for {class}/{name}"),
                        ));
                    }
                }
                _ => return Err(Error::malformed(path, lineno, "unrecognized model line")),
            }
        }
        let alpha = alpha.ok_or_else(|| Error::malformed(path, 1, "missing alpha header"))?;
        let classes: Vec<StanceLabel> = priors.keys().copied().collect();
        if classes.len() < 2 {
            return Err(Error::TooFewClasses { found: classes.len() });
        }
        let vocabulary: BTreeSet<String> = likelihoods
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect();
        let mut log_likelihood = Vec::with_capacity(classes.len());
        for class in &classes {
            let table = likelihoods.remove(class).unwrap_or_default();
            if table.len() != vocabulary.len() {
                return Err(Error::malformed(
                    path,
                    1,
                    format!("class {class} covers {} of {} vocabulary features", table.len(), vocabulary.len()),
                ));
            }
            log_likelihood.push(table);
        }
        let log_prior = classes.iter().map(|c| priors[c]).collect();
        Ok(NbModel {
            alpha,
            classes,
            log_prior,
            log_likelihood,
            vocabulary,
        })
    }
}

/// Train a Multinomial Naive Bayes model.
///
/// `examples` pairs each feature vector with its gold label. Classes are the
/// distinct labels present (at least two required), priors follow class
/// document counts, and likelihoods follow per-class feature mass with
/// add-`alpha` smoothing over the shared vocabulary.
pub fn train_nb(examples: &[(FeatureVector, StanceLabel)], alpha: f64) -> Result<NbModel> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::param("alpha", format!("must be finite and positive, got {alpha}")));
    }
    if examples.is_empty() {
        return Err(Error::EmptyInput { what: "training examples".into() });
    }
    let present: BTreeSet<StanceLabel> = examples.iter().map(|(_, l)| *l).collect();
    if present.len() < 2 {
        return Err(Error::TooFewClasses { found: present.len() });
    }
    let classes: Vec<StanceLabel> = StanceLabel::ALL
        .into_iter()
        .filter(|l| present.contains(l))
        .collect();
    let vocabulary: BTreeSet<String> = examples
        .iter()
        .flat_map(|(fv, _)| fv.names().map(str::to_string))
        .collect();

    let n = examples.len() as f64;
    let mut doc_counts = vec![0usize; classes.len()];
    let mut feature_counts: Vec<BTreeMap<&str, f64>> = vec![BTreeMap::new(); classes.len()];
    let mut mass = vec![0.0f64; classes.len()];
    for (fv, label) in examples {
        let c = classes
            .iter()
            .position(|l| l == label)
            .expect("label drawn from the class set");
        doc_counts[c] += 1;
        for (name, value) in fv.iter() {
            *feature_counts[c].entry(name).or_insert(0.0) += value;
            mass[c] += value;
        }
    }

    let v = vocabulary.len() as f64;
    let log_prior = doc_counts.iter().map(|&d| ((d as f64) / n).ln()).collect();
    let log_likelihood = (0..classes.len())
        .map(|c| {
            let denom = mass[c] + alpha * v;
            vocabulary
                .iter()
                .map(|name| {
                    let count = feature_counts[c].get(name.as_str()).copied().unwrap_or(0.0);
                    (name.clone(), ((count + alpha) / denom).ln())
                })
                .collect()
        })
        .collect();
    Ok(NbModel {
        alpha,
        classes,
        log_prior,
        log_likelihood,
        vocabulary,
    })
}
