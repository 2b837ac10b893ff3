//! Entity-linked sentences: validation, deduplication and a dictionary
//! matcher fallback for desk-scale runs.
//!
//! Offsets are Unicode scalar-value indices (character counts, not bytes);
//! the OpenNRE-style example records count characters, and this keeps offsets
//! portable across languages and encodings.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::ids::Cui;
use crate::util::{normalize_surface, normalize_ws};

/// One resolved entity mention; `[start, end)` in character offsets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mention {
    pub cui: Cui,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("mention offsets [{start},{end}) out of range or empty (text has {len} chars)")]
    BadOffsets { start: usize, end: usize, len: usize },
    #[error("mention surface `{declared}` does not match text slice `{actual}`")]
    SurfaceMismatch { declared: String, actual: String },
    #[error("mentions [{a_start},{a_end}) and [{b_start},{b_end}) overlap")]
    OverlappingMentions {
        a_start: usize,
        a_end: usize,
        b_start: usize,
        b_end: usize,
    },
}

/// A sentence with its validated, non-overlapping mentions sorted by start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedSentence {
    pub text: String,
    pub mentions: Vec<Mention>,
    pub source_id: String,
}

/// Character-based slice of `text` over `[start, end)`.
pub fn char_slice(text: &str, start: usize, end: usize) -> Option<String> {
    let mut it = text.chars();
    let mut out = String::new();
    for _ in 0..start {
        it.next()?;
    }
    for _ in start..end {
        out.push(it.next()?);
    }
    Some(out)
}

impl LinkedSentence {
    /// Validate offsets, surfaces and non-overlap; mentions are sorted by
    /// start position.
    pub fn new(
        text: String,
        mut mentions: Vec<Mention>,
        source_id: String,
    ) -> Result<Self, CorpusError> {
        let len = text.chars().count();
        mentions.sort_by(|a, b| {
            a.start
                .cmp(&b.start)
                .then(a.end.cmp(&b.end))
                .then_with(|| a.cui.cmp(&b.cui))
        });
        for m in &mentions {
            if m.start >= m.end || m.end > len {
                return Err(CorpusError::BadOffsets {
                    start: m.start,
                    end: m.end,
                    len,
                });
            }
            let actual = char_slice(&text, m.start, m.end).unwrap_or_default();
            if actual != m.surface {
                return Err(CorpusError::SurfaceMismatch {
                    declared: m.surface.clone(),
                    actual,
                });
            }
        }
        for pair in mentions.windows(2) {
            if pair[1].start < pair[0].end {
                return Err(CorpusError::OverlappingMentions {
                    a_start: pair[0].start,
                    a_end: pair[0].end,
                    b_start: pair[1].start,
                    b_end: pair[1].end,
                });
            }
        }
        Ok(LinkedSentence {
            text,
            mentions,
            source_id,
        })
    }
}

/// Streaming sentence deduplicator keyed by whitespace-normalized text.
/// First occurrence wins.
#[derive(Debug, Default)]
pub struct SentenceDedup {
    seen: BTreeSet<String>,
}

impl SentenceDedup {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true if the sentence is new (kept), false if a duplicate.
    pub fn insert(&mut self, text: &str) -> bool {
        self.seen.insert(normalize_ws(text))
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Deduplicate an in-memory batch; order-preserving, first occurrence wins.
pub fn dedup_sentences(sentences: Vec<LinkedSentence>) -> Vec<LinkedSentence> {
    let mut dedup = SentenceDedup::new();
    sentences
        .into_iter()
        .filter(|s| dedup.insert(&s.text))
        .collect()
}

/// What to do when one surface form maps to several CUIs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityPolicy {
    /// Do not emit a mention (default; avoids injecting linker noise).
    #[default]
    Skip,
    /// Emit one mention per candidate CUI (same span; for lexicon debugging,
    /// the result is not a valid `LinkedSentence` mention list).
    All,
    /// Emit the lexicographically first CUI.
    FirstCui,
}

/// Surface-form lexicon for the dictionary matcher.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    /// Normalized surface -> candidate CUIs.
    entries: BTreeMap<String, BTreeSet<Cui>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: &str, cui: Cui) {
        let key = normalize_surface(surface);
        if !key.is_empty() {
            self.entries.entry(key).or_default().insert(cui);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    fn get(&self, key: &str) -> Option<&BTreeSet<Cui>> {
        self.entries.get(key)
    }

    /// Surfaces as token sequences, longest (in tokens) first.
    fn token_keys(&self) -> Vec<Vec<&str>> {
        let mut keys: Vec<Vec<&str>> = self
            .entries
            .keys()
            .map(|k| k.split(' ').collect())
            .collect();
        keys.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        keys
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// A token with its character span.
#[derive(Debug, Clone)]
struct Token {
    start: usize,
    end: usize,
    lower: String,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<Token> = None;
    for (i, c) in text.chars().enumerate() {
        if is_word_char(c) {
            let tok = current.get_or_insert_with(|| Token {
                start: i,
                end: i,
                lower: String::new(),
            });
            tok.end = i + 1;
            for lc in c.to_lowercase() {
                tok.lower.push(lc);
            }
        } else if let Some(tok) = current.take() {
            tokens.push(tok);
        }
    }
    if let Some(tok) = current.take() {
        tokens.push(tok);
    }
    tokens
}

/// Longest-match-first, case-insensitive dictionary matching on token
/// boundaries. Matches never overlap; ambiguous surfaces are resolved per
/// `policy`.
pub fn dictionary_link(text: &str, lexicon: &Lexicon, policy: AmbiguityPolicy) -> Vec<Mention> {
    if lexicon.is_empty() {
        return Vec::new();
    }
    let tokens = tokenize(text);
    let keys = lexicon.token_keys();
    let max_len = keys.first().map_or(0, Vec::len);

    let mut mentions = Vec::new();
    let mut i = 0;
    'outer: while i < tokens.len() {
        let window_cap = max_len.min(tokens.len() - i);
        for span in (1..=window_cap).rev() {
            let candidate: Vec<&str> = tokens[i..i + span]
                .iter()
                .map(|t| t.lower.as_str())
                .collect();
            let key = candidate.join(" ");
            let Some(cuis) = lexicon.get(&key) else {
                continue;
            };
            let start = tokens[i].start;
            let end = tokens[i + span - 1].end;
            let surface = char_slice(text, start, end).expect("token span in range");
            let chosen: Vec<&Cui> = match policy {
                AmbiguityPolicy::Skip if cuis.len() > 1 => Vec::new(),
                AmbiguityPolicy::FirstCui => cuis.iter().take(1).collect(),
                AmbiguityPolicy::All => cuis.iter().collect(),
                AmbiguityPolicy::Skip => cuis.iter().take(1).collect(),
            };
            for cui in chosen {
                mentions.push(Mention {
                    cui: cui.clone(),
                    start,
                    end,
                    surface: surface.clone(),
                });
            }
            i += span;
            continue 'outer;
        }
        i += 1;
    }
    mentions
}

/// Dedup key used for sentence uniqueness; exposed for callers that stream.
pub fn sentence_key(text: &str) -> String {
    normalize_ws(text)
}
