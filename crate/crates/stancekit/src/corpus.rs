//! Tweet corpus types and on-disk formats.
//!
//! Tweets travel as JSON Lines. Token and dependency annotations travel in a
//! plain TSV block format so they can be produced by any external parser and
//! joined back onto the corpus by tweet id.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::Normalizer;

/// Stance of a tweet toward a topic.
///
/// The declaration order (FAVOR, AGAINST, NONE) is the canonical order used
/// for reports and for breaking ties between equal classifier scores.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum StanceLabel {
    #[serde(rename = "FAVOR")]
    Favor,
    #[serde(rename = "AGAINST")]
    Against,
    #[serde(rename = "NONE")]
    None,
}

impl StanceLabel {
    /// All labels in canonical order.
    pub const ALL: [StanceLabel; 3] = [StanceLabel::Favor, StanceLabel::Against, StanceLabel::None];

    /// Upper-case wire form of the label.
    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Favor => "FAVOR",
            StanceLabel::Against => "AGAINST",
            StanceLabel::None => "NONE",
        }
    }

    /// Position of the label in [`StanceLabel::ALL`].
    pub fn index(self) -> usize {
        match self {
            StanceLabel::Favor => 0,
            StanceLabel::Against => 1,
            StanceLabel::None => 2,
        }
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FAVOR" => Ok(StanceLabel::Favor),
            "AGAINST" => Ok(StanceLabel::Against),
            "NONE" => Ok(StanceLabel::None),
            other => Err(Error::UnknownLabel {
                value: other.to_string(),
            }),
        }
    }
}

/// Where a tweet came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Hand-labeled task data.
    Official,
    /// Collected by keyword search; labels, if any, are rule-derived.
    #[default]
    Harvested,
    /// Drawn from an unrelated random stream, used for NONE examples.
    RandomPool,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Official => "official",
            Source::Harvested => "harvested",
            Source::RandomPool => "random_pool",
        }
    }
}

/// One tweet with its topic and optional stance annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    pub topic: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stance: Option<StanceLabel>,
    #[serde(default)]
    pub source: Source,
}

impl Tweet {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("tweet id must be non-empty".to_string());
        }
        if self.id.contains(['\t', '\n', '\r']) {
            return Err(format!("tweet id {:?} contains whitespace control characters", self.id));
        }
        if self.topic.is_empty() {
            return Err(format!("tweet {} has an empty topic", self.id));
        }
        Ok(())
    }
}

/// One token of a tweet after normalization.
///
/// `index` is 1-based; `surface` is the raw form; `normalized` is the
/// repaired form; `pos` is either a part-of-speech tag from an external
/// parser or one of the coarse token-class tags (HASHTAG, MENTION, URL,
/// NUM, PUNCT, WORD).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub normalized: String,
    pub pos: String,
}

/// Head of a dependency arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcHead {
    /// The child is the root of the tree (stored as head 0).
    Root,
    /// The child is excluded from the tree (stored as head -1).
    Excluded,
    /// The child attaches to this 1-based token index.
    Token(usize),
}

impl ArcHead {
    /// Decode the integer form used in parse files.
    pub fn from_raw(raw: i64) -> Option<ArcHead> {
        match raw {
            0 => Some(ArcHead::Root),
            -1 => Some(ArcHead::Excluded),
            i if i > 0 => Some(ArcHead::Token(i as usize)),
            _ => None,
        }
    }

    /// Integer form used in parse files.
    pub fn to_raw(self) -> i64 {
        match self {
            ArcHead::Root => 0,
            ArcHead::Excluded => -1,
            ArcHead::Token(i) => i as i64,
        }
    }
}

/// One dependency arc: `child` attaches to `head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepArc {
    pub head: ArcHead,
    pub child: usize,
}

/// Tokens plus dependency arcs for a single tweet.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Parse {
    pub tokens: Vec<Token>,
    pub arcs: Vec<DepArc>,
}

impl Parse {
    /// Check the structural invariants shared by stored and generated parses.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.tokens.len();
        for (i, token) in self.tokens.iter().enumerate() {
            if token.index != i + 1 {
                return Err(format!(
                    "token at position {} has index {}; expected {}",
                    i,
                    token.index,
                    i + 1
                ));
            }
            if token.surface.is_empty() || token.normalized.is_empty() {
                return Err(format!("token {} has an empty form", token.index));
            }
            if token.pos.is_empty() {
                return Err(format!("token {} has an empty pos tag", token.index));
            }
        }
        let mut seen = HashSet::new();
        for arc in &self.arcs {
            if arc.child == 0 || arc.child > n {
                return Err(format!("arc child {} out of range 1..={n}", arc.child));
            }
            if !seen.insert(arc.child) {
                return Err(format!("token {} has more than one head", arc.child));
            }
            match arc.head {
                ArcHead::Token(h) => {
                    if h == 0 || h > n {
                        return Err(format!("arc head {h} out of range 1..={n}"));
                    }
                    if h == arc.child {
                        return Err(format!("token {} is its own head", arc.child));
                    }
                }
                ArcHead::Root | ArcHead::Excluded => {}
            }
        }
        Ok(())
    }
}

/// A tweet joined with its token and dependency annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTweet {
    pub tweet: Tweet,
    pub tokens: Vec<Token>,
    pub arcs: Vec<DepArc>,
    /// True when the annotations came from the built-in fallback chain
    /// rather than a stored parse.
    pub fallback: bool,
}

/// Read a JSON Lines tweet file.
///
/// Every non-blank line must be a complete tweet object; ids must be unique
/// within the file.
pub fn load_tweets(path: impl AsRef<Path>) -> Result<Vec<Tweet>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let tweet: Tweet = serde_json::from_str(&line)
            .map_err(|e| Error::malformed(path, idx + 1, e.to_string()))?;
        tweet
            .validate()
            .map_err(|msg| Error::malformed(path, idx + 1, msg))?;
        if !seen.insert(tweet.id.clone()) {
            return Err(Error::DuplicateId { id: tweet.id });
        }
        tweets.push(tweet);
    }
    Ok(tweets)
}

/// Write tweets as JSON Lines, one object per line, preserving order.
pub fn save_tweets(path: impl AsRef<Path>, tweets: &[Tweet]) -> Result<()> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    for tweet in tweets {
        tweet
            .validate()
            .map_err(|msg| Error::InvalidConfig { message: msg })?;
        if !seen.insert(tweet.id.as_str()) {
            return Err(Error::DuplicateId {
                id: tweet.id.clone(),
            });
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for tweet in tweets {
        let line = serde_json::to_string(tweet)
            .map_err(|e| Error::InvalidConfig { message: e.to_string() })?;
        writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a token/dependency annotation file.
///
/// The format is block-oriented: a `# id=<tweet id>` line opens a block, and
/// each following line carries `index`, `surface`, `normalized`, `pos`, and
/// `head` separated by tabs. Head 0 marks the root; head -1 marks a token
/// excluded from the tree. Blocks are separated by blank lines.
pub fn load_parses(path: impl AsRef<Path>) -> Result<BTreeMap<String, Parse>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut parses: BTreeMap<String, Parse> = BTreeMap::new();
    let mut current: Option<(String, Parse, usize)> = None;

    let finish = |current: &mut Option<(String, Parse, usize)>,
                      parses: &mut BTreeMap<String, Parse>|
     -> Result<()> {
        if let Some((id, parse, line_no)) = current.take() {
            parse
                .validate()
                .map_err(|msg| Error::InvalidParse {
                    id: id.clone(),
                    message: format!("{msg} (block starting near line {line_no})"),
                })?;
            if parses.insert(id.clone(), parse).is_some() {
                return Err(Error::DuplicateId { id });
            }
        }
        Ok(())
    };

    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            finish(&mut current, &mut parses)?;
            continue;
        }
        if let Some(id) = line.strip_prefix("# id=") {
            finish(&mut current, &mut parses)?;
            if id.is_empty() {
                return Err(Error::malformed(path, line_no, "empty tweet id in block header"));
            }
            current = Some((id.to_string(), Parse::default(), line_no));
            continue;
        }
        let Some((_, parse, _)) = current.as_mut() else {
            return Err(Error::malformed(
                path,
                line_no,
                "token line before any `# id=` block header",
            ));
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::malformed(
                path,
                line_no,
                format!("expected 5 tab-separated fields, found {}", fields.len()),
            ));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| Error::malformed(path, line_no, format!("bad token index {:?}", fields[0])))?;
        let raw_head: i64 = fields[4]
            .parse()
            .map_err(|_| Error::malformed(path, line_no, format!("bad head {:?}", fields[4])))?;
        let head = ArcHead::from_raw(raw_head)
            .ok_or_else(|| Error::malformed(path, line_no, format!("bad head {raw_head}")))?;
        parse.tokens.push(Token {
            index,
            surface: fields[1].to_string(),
            normalized: fields[2].to_string(),
            pos: fields[3].to_string(),
        });
        parse.arcs.push(DepArc { head, child: index });
    }
    finish(&mut current, &mut parses)?;
    Ok(parses)
}

/// Write token/dependency annotations in the block format read by
/// [`load_parses`]. Blocks are emitted in id order.
pub fn save_parses(path: impl AsRef<Path>, parses: &BTreeMap<String, Parse>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for (id, parse) in parses {
        parse.validate().map_err(|msg| Error::InvalidParse {
            id: id.clone(),
            message: msg,
        })?;
        let heads: BTreeMap<usize, ArcHead> =
            parse.arcs.iter().map(|arc| (arc.child, arc.head)).collect();
        writeln!(writer, "# id={id}").map_err(|e| Error::io(path, e))?;
        for token in &parse.tokens {
            let head = heads.get(&token.index).copied().unwrap_or(ArcHead::Excluded);
            writeln!(
                writer,
                "{}\t{}\t{}\t{}\t{}",
                token.index,
                token.surface,
                token.normalized,
                token.pos,
                head.to_raw()
            )
            .map_err(|e| Error::io(path, e))?;
        }
        writeln!(writer).map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Join tweets with stored parses, generating fallback annotations for any
/// tweet without a stored block. Input order is preserved.
pub fn attach_parses(
    tweets: &[Tweet],
    parses: &BTreeMap<String, Parse>,
    normalizer: &Normalizer,
) -> Vec<ParsedTweet> {
    tweets
        .iter()
        .map(|tweet| match parses.get(&tweet.id) {
            Some(parse) => ParsedTweet {
                tweet: tweet.clone(),
                tokens: parse.tokens.clone(),
                arcs: parse.arcs.clone(),
                fallback: false,
            },
            None => {
                let (tokens, arcs) = normalizer.fallback_parse(&tweet.text);
                ParsedTweet {
                    tweet: tweet.clone(),
                    tokens,
                    arcs,
                    fallback: true,
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet(id: &str, text: &str) -> Tweet {
        Tweet {
            id: id.to_string(),
            text: text.to_string(),
            topic: "climate".to_string(),
            stance: None,
            source: Source::Harvested,
        }
    }

    #[test]
    fn stance_label_round_trips_through_strings() {
        for label in StanceLabel::ALL {
            assert_eq!(label.as_str().parse::<StanceLabel>().unwrap(), label);
        }
        assert!(matches!(
            "FAVOUR".parse::<StanceLabel>(),
            Err(Error::UnknownLabel { .. })
        ));
    }

    #[test]
    fn stance_label_order_matches_tie_break_order() {
        assert!(StanceLabel::Favor < StanceLabel::Against);
        assert!(StanceLabel::Against < StanceLabel::None);
    }

    #[test]
    fn tweets_round_trip_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tweets.jsonl");
        let mut a = tweet("a1", "no snow in winter #hoax");
        a.stance = Some(StanceLabel::Against);
        let mut b = tweet("b2", "save the planet");
        b.source = Source::RandomPool;
        let tweets = vec![a, b];
        save_tweets(&path, &tweets).unwrap();
        let loaded = load_tweets(&path).unwrap();
        assert_eq!(loaded, tweets);
    }

    #[test]
    fn stance_field_serializes_with_task_casing() {
        let mut t = tweet("a1", "x");
        t.stance = Some(StanceLabel::Favor);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"stance\":\"FAVOR\""), "{json}");
        assert!(json.contains("\"source\":\"harvested\""), "{json}");
    }

    #[test]
    fn load_tweets_rejects_duplicate_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tweets.jsonl");
        let mut f = File::create(&path).unwrap();
        let t = tweet("same", "x");
        writeln!(f, "{}", serde_json::to_string(&t).unwrap()).unwrap();
        writeln!(f, "{}", serde_json::to_string(&t).unwrap()).unwrap();
        drop(f);
        assert!(matches!(
            load_tweets(&path),
            Err(Error::DuplicateId { id }) if id == "same"
        ));
    }

    #[test]
    fn load_tweets_reports_line_numbers_for_bad_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tweets.jsonl");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "{}", serde_json::to_string(&tweet("a", "x")).unwrap()).unwrap();
        writeln!(f, "{{not json").unwrap();
        drop(f);
        match load_tweets(&path) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed line error, got {other:?}"),
        }
    }

    #[test]
    fn load_tweets_rejects_unknown_fields_and_empty_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tweets.jsonl");
        std::fs::write(
            &path,
            "{\"id\":\"a\",\"text\":\"x\",\"topic\":\"t\",\"stance\":\"FAVOR\",\"extra\":1}\n",
        )
        .unwrap();
        assert!(matches!(load_tweets(&path), Err(Error::MalformedLine { .. })));

        std::fs::write(&path, "{\"id\":\"\",\"text\":\"x\",\"topic\":\"t\"}\n").unwrap();
        assert!(matches!(load_tweets(&path), Err(Error::MalformedLine { .. })));
    }

    fn sample_parse() -> Parse {
        Parse {
            tokens: vec![
                Token {
                    index: 1,
                    surface: "Snow".into(),
                    normalized: "snow".into(),
                    pos: "N".into(),
                },
                Token {
                    index: 2,
                    surface: "melts".into(),
                    normalized: "melts".into(),
                    pos: "V".into(),
                },
                Token {
                    index: 3,
                    surface: "#hoax".into(),
                    normalized: "#hoax".into(),
                    pos: "HASHTAG".into(),
                },
            ],
            arcs: vec![
                DepArc { head: ArcHead::Token(2), child: 1 },
                DepArc { head: ArcHead::Root, child: 2 },
                DepArc { head: ArcHead::Excluded, child: 3 },
            ],
        }
    }

    #[test]
    fn parses_round_trip_through_tsv_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.parses.tsv");
        let mut parses = BTreeMap::new();
        parses.insert("a1".to_string(), sample_parse());
        let mut second = sample_parse();
        second.tokens.truncate(2);
        second.arcs.truncate(2);
        parses.insert("b2".to_string(), second);
        save_parses(&path, &parses).unwrap();
        let loaded = load_parses(&path).unwrap();
        assert_eq!(loaded, parses);
    }

    #[test]
    fn load_parses_rejects_head_out_of_range() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.parses.tsv");
        std::fs::write(&path, "# id=a\n1\tx\tx\tN\t7\n").unwrap();
        assert!(matches!(load_parses(&path), Err(Error::InvalidParse { .. })));
    }

    #[test]
    fn load_parses_rejects_self_headed_tokens_and_gapped_indices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.parses.tsv");
        std::fs::write(&path, "# id=a\n1\tx\tx\tN\t1\n").unwrap();
        assert!(matches!(load_parses(&path), Err(Error::InvalidParse { .. })));
        std::fs::write(&path, "# id=a\n2\tx\tx\tN\t0\n").unwrap();
        assert!(matches!(load_parses(&path), Err(Error::InvalidParse { .. })));
    }

    #[test]
    fn load_parses_rejects_duplicate_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.parses.tsv");
        std::fs::write(&path, "# id=a\n1\tx\tx\tN\t0\n\n# id=a\n1\ty\ty\tN\t0\n").unwrap();
        assert!(matches!(load_parses(&path), Err(Error::DuplicateId { .. })));
    }

    #[test]
    fn attach_parses_uses_stored_blocks_and_falls_back() {
        let normalizer = Normalizer::default();
        let tweets = vec![tweet("a1", "Snow melts #hoax"), tweet("zz", "so cold")];
        let mut parses = BTreeMap::new();
        parses.insert("a1".to_string(), sample_parse());
        let joined = attach_parses(&tweets, &parses, &normalizer);
        assert_eq!(joined.len(), 2);
        assert!(!joined[0].fallback);
        assert_eq!(joined[0].tokens.len(), 3);
        assert!(joined[1].fallback);
        assert_eq!(joined[1].tokens.len(), 2);
        assert_eq!(joined[1].arcs[0].head, ArcHead::Root);
        assert_eq!(joined[1].arcs[1].head, ArcHead::Token(1));
    }
}
