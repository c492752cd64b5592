//! Tweet text normalization.
//!
//! Covers whitespace tokenization with punctuation detachment, coarse token
//! classes, squeezing of long character runs, dictionary/lexicon repair of
//! out-of-vocabulary words, right-branching fallback parses, and hashtag
//! stripping.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::{ArcHead, DepArc, ParsedTweet, Token};
use crate::error::{Error, Result};

/// Coarse class assigned to each token at tokenization time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenClass {
    Hashtag,
    Mention,
    Url,
    Num,
    Punct,
    Word,
}

impl TokenClass {
    /// Tag string stored in the `pos` field when no real tagger ran.
    pub fn tag(self) -> &'static str {
        match self {
            TokenClass::Hashtag => "HASHTAG",
            TokenClass::Mention => "MENTION",
            TokenClass::Url => "URL",
            TokenClass::Num => "NUM",
            TokenClass::Punct => "PUNCT",
            TokenClass::Word => "WORD",
        }
    }
}

/// A raw token before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    pub text: String,
    pub class: TokenClass,
}

fn is_punct_char(c: char) -> bool {
    c.is_ascii_punctuation()
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Digits with optional `.`, `,`, `%` — the shape of a NUM token.
fn is_numeric_core(chars: &[char]) -> bool {
    chars.iter().any(|c| c.is_ascii_digit())
        && chars
            .iter()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '%'))
}

fn classify_core(core: &str) -> TokenClass {
    let mut chars = core.chars();
    let first = chars.next().expect("core token is non-empty");
    let rest_len = chars.count();
    if first == '#' && rest_len >= 1 {
        return TokenClass::Hashtag;
    }
    if first == '@' && rest_len >= 1 {
        return TokenClass::Mention;
    }
    let all: Vec<char> = core.chars().collect();
    if is_numeric_core(&all) {
        return TokenClass::Num;
    }
    if core.chars().all(is_punct_char) {
        return TokenClass::Punct;
    }
    TokenClass::Word
}

fn split_chunk(chunk: &str, out: &mut Vec<RawToken>) {
    if is_url(chunk) {
        out.push(RawToken {
            text: chunk.to_string(),
            class: TokenClass::Url,
        });
        return;
    }
    let chars: Vec<char> = chunk.chars().collect();
    let n = chars.len();

    // Leading punctuation run; a '#' or '@' that introduces a tag stays with
    // the core token.
    let mut start = 0;
    while start < n && is_punct_char(chars[start]) {
        if matches!(chars[start], '#' | '@') && start + 1 < n && !is_punct_char(chars[start + 1]) {
            break;
        }
        start += 1;
    }
    if start == n {
        out.push(RawToken {
            text: chunk.to_string(),
            class: TokenClass::Punct,
        });
        return;
    }

    // Trailing punctuation run. A '%' closing a numeric token ("50%") binds
    // to the number; '.' and ',' at the very end are sentence punctuation
    // even after digits ("3.5," → "3.5" + ",").
    let mut end = n;
    while end > start + 1 && is_punct_char(chars[end - 1]) {
        if chars[end - 1] == '%' && is_numeric_core(&chars[start..end]) {
            break;
        }
        end -= 1;
    }
    // A single leftover char that is pure punctuation belongs to the core
    // only if nothing else remains; the loop above guarantees end > start.

    if start > 0 {
        out.push(RawToken {
            text: chars[..start].iter().collect(),
            class: TokenClass::Punct,
        });
    }
    let core: String = chars[start..end].iter().collect();
    out.push(RawToken {
        class: classify_core(&core),
        text: core,
    });
    if end < n {
        out.push(RawToken {
            text: chars[end..].iter().collect(),
            class: TokenClass::Punct,
        });
    }
}

/// Split text on whitespace, detaching leading and trailing punctuation runs
/// as their own tokens, and classify every token.
///
/// URLs are kept whole; `#tag` and `@user` keep their sigils. The output
/// never contains empty tokens, and joining the tokens of any chunk
/// reproduces the chunk.
pub fn tokenize(text: &str) -> Vec<RawToken> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        split_chunk(chunk, &mut out);
    }
    out
}

/// Reduce every run of three or more identical characters to exactly two.
///
/// `soooo` becomes `soo`; runs of one or two characters are untouched, so the
/// function is idempotent.
pub fn squeeze_repeats(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    let mut run_char: Option<char> = None;
    let mut run_len = 0usize;
    for c in token.chars() {
        if run_char == Some(c) {
            run_len += 1;
        } else {
            run_char = Some(c);
            run_len = 1;
        }
        if run_len <= 2 {
            out.push(c);
        }
    }
    out
}

/// A case-insensitive word list.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    words: HashSet<String>,
}

impl Dictionary {
    /// Build a dictionary from any iterator of words; entries are lowercased.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Dictionary {
            words: words
                .into_iter()
                .map(|w| w.as_ref().to_lowercase())
                .collect(),
        }
    }

    /// Load a dictionary file with one word per line; blank lines are skipped.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut words = HashSet::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let word = line.trim();
            if !word.is_empty() {
                words.insert(word.to_lowercase());
            }
        }
        Ok(Dictionary { words })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Variant-to-canonical substitutions for out-of-vocabulary tokens.
#[derive(Debug, Clone, Default)]
pub struct NormalizationLexicon {
    map: HashMap<String, String>,
}

impl NormalizationLexicon {
    /// Build a lexicon from (variant, canonical) pairs; variants are matched
    /// case-insensitively.
    pub fn from_pairs<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        NormalizationLexicon {
            map: pairs
                .into_iter()
                .map(|(v, c)| (v.as_ref().to_lowercase(), c.as_ref().to_string()))
                .collect(),
        }
    }

    /// Load a two-column TSV of `variant<TAB>canonical`. Lines starting with
    /// `#` are comments; duplicate variants are an error.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut map = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (variant, canonical) = trimmed.split_once('\t').ok_or_else(|| {
                Error::malformed(path, idx + 1, "expected variant<TAB>canonical")
            })?;
            let variant = variant.trim().to_lowercase();
            let canonical = canonical.trim().to_string();
            if variant.is_empty() || canonical.is_empty() {
                return Err(Error::malformed(path, idx + 1, "empty variant or canonical form"));
            }
            // Repairs replace a single token, so neither side may contain
            // whitespace of its own.
            if variant.contains(char::is_whitespace) || canonical.contains(char::is_whitespace) {
                return Err(Error::malformed(
                    path,
                    idx + 1,
                    "variant and canonical form must be single tokens",
                ));
            }
            if map.insert(variant.clone(), canonical).is_some() {
                return Err(Error::malformed(
                    path,
                    idx + 1,
                    format!("duplicate variant {variant:?}"),
                ));
            }
        }
        Ok(NormalizationLexicon { map })
    }

    pub fn lookup(&self, token: &str) -> Option<&str> {
        self.map.get(&token.to_lowercase()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Repair one squeezed token: dictionary words pass through, lexicon variants
/// are substituted, and everything else is left alone.
pub fn normalize_token(token: &str, dictionary: &Dictionary, lexicon: &NormalizationLexicon) -> String {
    if dictionary.contains(token) {
        return token.to_string();
    }
    if let Some(canonical) = lexicon.lookup(token) {
        return canonical.to_string();
    }
    token.to_string()
}

/// Right-branching fallback arcs: token 1 is the root and every later token
/// attaches to its left neighbor.
pub fn fallback_arcs(token_count: usize) -> Vec<DepArc> {
    (1..=token_count)
        .map(|child| DepArc {
            head: if child == 1 { ArcHead::Root } else { ArcHead::Token(child - 1) },
            child,
        })
        .collect()
}

/// Bundles the dictionary and normalization lexicon used to produce
/// normalized tokens and fallback parses.
#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    pub dictionary: Dictionary,
    pub lexicon: NormalizationLexicon,
}

impl Normalizer {
    pub fn new(dictionary: Dictionary, lexicon: NormalizationLexicon) -> Self {
        Normalizer { dictionary, lexicon }
    }

    /// Tokenize, squeeze, and repair one text, producing indexed tokens.
    ///
    /// Squeezing applies to every token class; dictionary/lexicon repair only
    /// to WORD tokens.
    pub fn token_stream(&self, text: &str) -> Vec<Token> {
        tokenize(text)
            .into_iter()
            .enumerate()
            .map(|(i, raw)| {
                let squeezed = squeeze_repeats(&raw.text);
                let normalized = if raw.class == TokenClass::Word {
                    normalize_token(&squeezed, &self.dictionary, &self.lexicon)
                } else {
                    squeezed
                };
                Token {
                    index: i + 1,
                    surface: raw.text,
                    normalized,
                    pos: raw.class.tag().to_string(),
                }
            })
            .collect()
    }

    /// Normalized tokens plus right-branching fallback arcs for one text.
    pub fn fallback_parse(&self, text: &str) -> (Vec<Token>, Vec<DepArc>) {
        let tokens = self.token_stream(text);
        let arcs = fallback_arcs(tokens.len());
        (tokens, arcs)
    }
}

fn is_hashtag_token(token: &Token) -> bool {
    token.pos == "HASHTAG"
        || token.surface.starts_with('#')
        || token.normalized.starts_with('#')
}

/// Remove hashtag tokens from a parsed tweet.
///
/// Surviving tokens are reindexed from 1; arcs incident to a removed token
/// are dropped and surviving heads are remapped. The operation is idempotent
/// and leaves hashtag-free tweets unchanged.
pub fn strip_hashtags(parsed: &ParsedTweet) -> ParsedTweet {
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut tokens = Vec::new();
    for token in &parsed.tokens {
        if is_hashtag_token(token) {
            continue;
        }
        let new_index = tokens.len() + 1;
        remap.insert(token.index, new_index);
        tokens.push(Token {
            index: new_index,
            surface: token.surface.clone(),
            normalized: token.normalized.clone(),
            pos: token.pos.clone(),
        });
    }
    let arcs = parsed
        .arcs
        .iter()
        .filter_map(|arc| {
            let child = *remap.get(&arc.child)?;
            let head = match arc.head {
                ArcHead::Root => ArcHead::Root,
                ArcHead::Excluded => ArcHead::Excluded,
                ArcHead::Token(h) => ArcHead::Token(*remap.get(&h)?),
            };
            Some(DepArc { head, child })
        })
        .collect();
    ParsedTweet {
        tweet: parsed.tweet.clone(),
        tokens,
        arcs,
        fallback: parsed.fallback,
    }
}
