//! Topic association scores for n-grams.
//!
//! From a multi-topic background corpus, every n-gram (n <= 3) that clears a
//! document-frequency cutoff gets a normalized pointwise mutual information
//! score against the target topic, computed over document presence with
//! add-one smoothing. The top slice of the table by score forms the topic
//! "pool" that the `pmi:*` feature family consults.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Largest n-gram order used by the table and by tweet lookups.
pub const MAX_NGRAM: usize = 3;

/// Default document-frequency cutoff for table entries.
pub const DEFAULT_MIN_DF: usize = 2;

/// All contiguous n-grams of `tokens` up to `max_n`, space-joined,
/// de-duplicated per document.
pub fn distinct_ngrams(tokens: &[String], max_n: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for n in 1..=max_n {
        if n > tokens.len() {
            break;
        }
        for window in tokens.windows(n) {
            out.insert(window.join(" "));
        }
    }
    out
}

/// n-gram score table plus the top-percent pool for one topic.
#[derive(Debug, Clone, PartialEq)]
pub struct PmiModel {
    pub topic: String,
    pub top_percent: f64,
    pub min_df: usize,
    table: BTreeMap<String, f64>,
    pool: BTreeSet<String>,
}

impl PmiModel {
    /// Score of an n-gram, if it cleared the document-frequency cutoff.
    pub fn npmi(&self, ngram: &str) -> Option<f64> {
        self.table.get(ngram).copied()
    }

    /// True when the n-gram sits in the top slice of the table.
    pub fn in_pool(&self, ngram: &str) -> bool {
        self.pool.contains(ngram)
    }

    pub fn table(&self) -> &BTreeMap<String, f64> {
        &self.table
    }

    pub fn pool(&self) -> &BTreeSet<String> {
        &self.pool
    }

    /// Write the model as TSV: `# key=value` headers, then one
    /// `ngram<TAB>score<TAB>in_pool` row per table entry in n-gram order.
    /// Scores carry 17 significant digits so a reload is bit-for-bit.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# topic={}", self.topic).map_err(|e| Error::io(path, e))?;
        writeln!(w, "# top_percent={:.16e}", self.top_percent).map_err(|e| Error::io(path, e))?;
        writeln!(w, "# min_df={}", self.min_df).map_err(|e| Error::io(path, e))?;
        for (ngram, score) in &self.table {
            let in_pool = u8::from(self.pool.contains(ngram));
            writeln!(w, "{ngram}\t{score:.16e}\t{in_pool}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Read a model written by [`PmiModel::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut topic = None;
        let mut top_percent = None;
        let mut min_df = None;
        let mut table = BTreeMap::new();
        let mut pool = BTreeSet::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (key, value) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::malformed(path, idx + 1, "bad header line"))?;
                match key {
                    "topic" => topic = Some(value.to_string()),
                    "top_percent" => {
                        top_percent = Some(value.parse().map_err(|_| {
                            Error::malformed(path, idx + 1, "bad top_percent")
                        })?)
                    }
                    "min_df" => {
                        min_df = Some(value.parse().map_err(|_| {
                            Error::malformed(path, idx + 1, "bad min_df")
                        })?)
                    }
                    other => {
                        return Err(Error::malformed(
                            path,
                            idx + 1,
                            format!("unknown header {other:?}"),
                        ))
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::malformed(
                    path,
                    idx + 1,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let score: f64 = fields[1]
                .parse()
                .map_err(|_| Error::malformed(path, idx + 1, "bad score"))?;
            let in_pool = match fields[2] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::malformed(
                        path,
                        idx + 1,
                        format!("bad pool flag {other:?}"),
                    ))
                }
            };
            if table.insert(fields[0].to_string(), score).is_some() {
                return Err(Error::malformed(
                    path,
                    idx + 1,
                    format!("duplicate n-gram {:?}", fields[0]),
                ));
            }
            if in_pool {
                pool.insert(fields[0].to_string());
            }
        }
        let topic = topic.ok_or_else(|| Error::malformed(path, 1, "missing topic header"))?;
        Ok(PmiModel {
            topic,
            top_percent: top_percent
                .ok_or_else(|| Error::malformed(path, 1, "missing top_percent header"))?,
            min_df: min_df.ok_or_else(|| Error::malformed(path, 1, "missing min_df header"))?,
            table,
            pool,
        })
    }
}

/// Build the n-gram association table for `topic`.
///
/// `documents` are (topic, tokens) pairs covering at least two topics, with
/// at least one document on the target topic. An n-gram enters the table
/// when it appears in at least `min_df` documents. With document counts
/// `D` (total), `Dt` (on topic), `df(g)`, and `df(g, t)`, the score is
///
/// ```text
/// npmi(g) = ln(p(g,t) / (p(g) p(t))) / -ln p(g,t)
/// ```
///
/// with every probability smoothed as `(count + 1) / (D + 1)`. The smoothing
/// keeps scores finite and inside [-1, 1]. The pool keeps the top
/// `ceil(top_percent% of table size)` n-grams by score, breaking score ties
/// by n-gram order.
pub fn build_pmi_model(
    documents: &[(String, Vec<String>)],
    topic: &str,
    top_percent: f64,
    min_df: usize,
) -> Result<PmiModel> {
    if documents.is_empty() {
        return Err(Error::EmptyInput {
            what: "pmi corpus".to_string(),
        });
    }
    if !(top_percent > 0.0 && top_percent <= 100.0) {
        return Err(Error::param(
            "top_percent",
            format!("{top_percent} outside (0, 100]"),
        ));
    }
    if min_df == 0 {
        return Err(Error::param("min_df", "must be at least 1"));
    }
    let topics: HashSet<&str> = documents.iter().map(|(t, _)| t.as_str()).collect();
    if topics.len() < 2 {
        return Err(Error::param(
            "pmi corpus",
            "needs documents from at least two topics",
        ));
    }
    if !topics.contains(topic) {
        return Err(Error::param(
            "pmi corpus",
            format!("no documents for topic {topic:?}"),
        ));
    }

    let d_total = documents.len();
    let d_topic = documents.iter().filter(|(t, _)| t == topic).count();
    let mut df: HashMap<String, (usize, usize)> = HashMap::new();
    for (doc_topic, tokens) in documents {
        let on_topic = doc_topic == topic;
        for ngram in distinct_ngrams(tokens, MAX_NGRAM) {
            let entry = df.entry(ngram).or_insert((0, 0));
            entry.0 += 1;
            if on_topic {
                entry.1 += 1;
            }
        }
    }

    let d1 = (d_total + 1) as f64;
    let p_topic = (d_topic + 1) as f64 / d1;
    let table: BTreeMap<String, f64> = df
        .into_iter()
        .filter(|(_, (all, _))| *all >= min_df)
        .map(|(ngram, (all, on_topic))| {
            let p_joint = (on_topic + 1) as f64 / d1;
            let p_gram = (all + 1) as f64 / d1;
            let npmi = (p_joint / (p_gram * p_topic)).ln() / -p_joint.ln();
            (ngram, npmi)
        })
        .collect();

    let pool_size = ((top_percent * table.len() as f64) / 100.0).ceil() as usize;
    let pool_size = pool_size.min(table.len());
    let mut ranked: Vec<(&String, f64)> = table.iter().map(|(g, s)| (g, *s)).collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("npmi scores are finite")
            .then_with(|| a.0.cmp(b.0))
    });
    let pool: BTreeSet<String> = ranked
        .into_iter()
        .take(pool_size)
        .map(|(g, _)| g.clone())
        .collect();

    Ok(PmiModel {
        topic: topic.to_string(),
        top_percent,
        min_df,
        table,
        pool,
    })
}

/// Bucket a score in [-1, 1] into one of twenty width-0.1 bins and format
/// the bin as `(lo,hi]`. Scores at or below -1 fall into `(-1.0,-0.9]`.
pub fn npmi_bin_label(score: f64) -> String {
    let k = ((score * 10.0).ceil() as i64 + 9).clamp(0, 19);
    let lo = (k - 10) as f64 / 10.0;
    let hi = (k - 9) as f64 / 10.0;
    format!("({lo:.1},{hi:.1}]")
}

#[derive(Debug, Deserialize)]
struct PmiDocLine {
    topic: String,
    text: String,
}

/// Read a background corpus for PMI building: JSON Lines with at least
/// `topic` and `text` fields; any other fields are ignored, so harvested
/// tweet files work as-is.
pub fn load_pmi_corpus(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: PmiDocLine = serde_json::from_str(&line)
            .map_err(|e| Error::malformed(path, idx + 1, e.to_string()))?;
        docs.push((doc.topic, doc.text));
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    /// Six documents over two topics; see the hand-computed scores below.
    fn toy_corpus() -> Vec<(String, Vec<String>)> {
        vec![
            ("climate".into(), toks(&["ice", "melt", "fast"])),
            ("climate".into(), toks(&["ice", "melt"])),
            ("climate".into(), toks(&["hoax", "lie"])),
            ("abortion".into(), toks(&["choice", "life"])),
            ("abortion".into(), toks(&["ice", "choice"])),
            ("abortion".into(), toks(&["life", "fast"])),
        ]
    }

    /// Independent arithmetic for the toy corpus: D=6, Dt=3, so with add-one
    /// smoothing p(t)=4/7 and each df of k becomes (k+1)/7.
    fn expected_npmi(df_all: usize, df_topic: usize) -> f64 {
        let p_joint = (df_topic + 1) as f64 / 7.0;
        let p_gram = (df_all + 1) as f64 / 7.0;
        let p_topic = 4.0 / 7.0;
        (p_joint / (p_gram * p_topic)).ln() / -p_joint.ln()
    }

    #[test]
    fn distinct_ngrams_cover_all_orders_once() {
        let grams = distinct_ngrams(&toks(&["a", "b", "a", "b"]), 3);
        let expected: BTreeSet<String> = ["a", "b", "a b", "b a", "a b a", "b a b"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(grams, expected);
        assert!(distinct_ngrams(&[], 3).is_empty());
    }

    #[test]
    fn toy_corpus_table_matches_hand_computation() {
        let model = build_pmi_model(&toy_corpus(), "climate", 50.0, 2).unwrap();
        // df >= 2 keeps exactly these six n-grams.
        let names: Vec<&str> = model.table().keys().map(String::as_str).collect();
        assert_eq!(names, vec!["choice", "fast", "ice", "ice melt", "life", "melt"]);

        let close = |g: &str, v: f64| {
            let got = model.npmi(g).unwrap();
            assert!((got - v).abs() < 1e-12, "{g}: {got} vs {v}");
        };
        close("melt", expected_npmi(2, 2));
        close("ice melt", expected_npmi(2, 2));
        close("ice", expected_npmi(3, 2));
        close("fast", expected_npmi(2, 1));
        close("choice", expected_npmi(2, 0));
        close("life", expected_npmi(2, 0));

        // Frozen decimals for the same quantities, as a second, independent
        // anchor: ln(7/4)/ln(7/3), ln(21/16)/ln(7/3), ln(7/6)/ln(7/2),
        // ln(7/12)/ln(7).
        assert!((model.npmi("melt").unwrap() - 0.660_471_144_916_719).abs() < 1e-12);
        assert!((model.npmi("ice").unwrap() - 0.320_942_289_833_437_9).abs() < 1e-12);
        assert!((model.npmi("fast").unwrap() - 0.123_048_560_425_122_67).abs() < 1e-12);
        assert!((model.npmi("choice").unwrap() - -0.276_989_408_269_623_87).abs() < 1e-12);
    }

    #[test]
    fn toy_pool_takes_top_half_with_lexicographic_ties() {
        let model = build_pmi_model(&toy_corpus(), "climate", 50.0, 2).unwrap();
        // ceil(50% of 6) = 3: the tie between "melt" and "ice melt" at the
        // top doesn't matter for membership, third place is "ice".
        let pool: Vec<&str> = model.pool().iter().map(String::as_str).collect();
        assert_eq!(pool, vec!["ice", "ice melt", "melt"]);
    }

    #[test]
    fn pool_tie_break_is_lexicographic() {
        // "choice" and "life" tie exactly (same counts); with pool size 5 the
        // tie decides which one enters.
        let model = build_pmi_model(&toy_corpus(), "climate", 75.0, 2).unwrap();
        // ceil(0.75 * 6) = 5: ice melt, melt, ice, fast, then choice < life.
        assert!(model.in_pool("choice"));
        assert!(!model.in_pool("life"));
    }

    #[test]
    fn npmi_stays_in_unit_interval() {
        let model = build_pmi_model(&toy_corpus(), "climate", 10.0, 1).unwrap();
        for (ngram, score) in model.table() {
            assert!(
                (-1.0..=1.0).contains(score),
                "{ngram} has out-of-range score {score}"
            );
        }
    }

    #[test]
    fn build_validates_inputs() {
        let docs = toy_corpus();
        assert!(build_pmi_model(&[], "climate", 10.0, 2).is_err());
        assert!(build_pmi_model(&docs, "climate", 0.0, 2).is_err());
        assert!(build_pmi_model(&docs, "climate", 101.0, 2).is_err());
        assert!(build_pmi_model(&docs, "climate", 10.0, 0).is_err());
        assert!(build_pmi_model(&docs, "absent", 10.0, 2).is_err());
        let single: Vec<(String, Vec<String>)> =
            vec![("climate".into(), toks(&["ice"])), ("climate".into(), toks(&["melt"]))];
        assert!(build_pmi_model(&single, "climate", 10.0, 2).is_err());
    }

    #[test]
    fn bin_labels_partition_the_interval() {
        assert_eq!(npmi_bin_label(0.95), "(0.9,1.0]");
        assert_eq!(npmi_bin_label(1.0), "(0.9,1.0]");
        assert_eq!(npmi_bin_label(0.1), "(0.0,0.1]");
        assert_eq!(npmi_bin_label(0.0), "(-0.1,0.0]");
        assert_eq!(npmi_bin_label(-0.05), "(-0.1,0.0]");
        assert_eq!(npmi_bin_label(-0.95), "(-1.0,-0.9]");
        assert_eq!(npmi_bin_label(-1.0), "(-1.0,-0.9]");
        // Out-of-range scores clamp to the edge bins.
        assert_eq!(npmi_bin_label(7.0), "(0.9,1.0]");
        assert_eq!(npmi_bin_label(-7.0), "(-1.0,-0.9]");
    }

    #[test]
    fn model_file_round_trips_bit_for_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pmi.tsv");
        let model = build_pmi_model(&toy_corpus(), "climate", 50.0, 2).unwrap();
        model.save(&path).unwrap();
        let loaded = PmiModel::load(&path).unwrap();
        assert_eq!(loaded, model);
        let second = dir.path().join("pmi2.tsv");
        loaded.save(&second).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&second).unwrap(),
            "save -> load -> save must be byte-identical"
        );
    }

    #[test]
    fn pmi_corpus_reader_ignores_extra_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(
            &path,
            concat!(
                "{\"topic\":\"climate\",\"text\":\"ice melts\"}\n",
                "\n",
                "{\"id\":\"t9\",\"text\":\"choose life\",\"topic\":\"abortion\",\"stance\":\"AGAINST\",\"source\":\"harvested\"}\n",
            ),
        )
        .unwrap();
        let docs = load_pmi_corpus(&path).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0], ("climate".to_string(), "ice melts".to_string()));
        assert_eq!(docs[1].0, "abortion");

        std::fs::write(&path, "{\"text\":\"no topic\"}\n").unwrap();
        assert!(load_pmi_corpus(&path).is_err());
    }
}
