//! Message cleaning: URL stripping, artifact-token removal, diacritic-safe
//! punctuation removal, script filtering, and whitespace normalization.
//!
//! The full pipeline ([`clean_post`]) applies the steps in a fixed order —
//! URLs first (punctuation removal would destroy URL syntax), scripts last —
//! and the per-scalar rules are written so that no Sinhala-block scalar is
//! ever touched by punctuation stripping. The virama + zero-width-joiner
//! sequences that encode rakārānsaya, yansaya and repaya ligatures survive
//! intact; a ZWJ without Sinhala context is removed like any other stray
//! symbol.

use std::collections::{BTreeMap, BTreeSet};

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::ingest::PostRecord;
use crate::unicode_text::{classify_codepoint, tokenize, ScriptClass, VIRAMA, ZWJ};

/// What to do with punctuation-class scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PunctuationPolicy {
    /// Leave punctuation alone.
    Off,
    /// Delete apostrophe-like marks in place (so "it's" becomes "its", not
    /// "it s"), replace every other punctuation scalar with a space, and
    /// never touch a Sinhala-block scalar.
    DiacriticSafe,
}

/// What to do with zero-width joiners during script filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZwjPolicy {
    /// Keep a ZWJ only where it plausibly forms a Sinhala ligature:
    /// immediately after a virama or immediately before a Sinhala scalar.
    PreserveContextual,
    /// Remove every ZWJ.
    StripAll,
}

/// The full set of cleaning switches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningConfig {
    #[serde(default = "default_true")]
    pub strip_urls: bool,
    #[serde(default = "default_punctuation_policy")]
    pub punctuation_policy: PunctuationPolicy,
    /// Punctuation scalars deleted in place instead of being replaced by a
    /// space. Default: ASCII apostrophe and right single quotation mark.
    #[serde(default = "default_apostrophes")]
    pub apostrophe_chars: BTreeSet<char>,
    /// Classes of scalar that survive script filtering. Whitespace is always
    /// included.
    #[serde(default = "default_whitelist")]
    pub script_whitelist: BTreeSet<ScriptClass>,
    /// Tokens removed when a message token equals one exactly.
    #[serde(default = "default_artifact_tokens")]
    pub artifact_tokens: BTreeSet<String>,
    /// Tokens removed when a message token merely contains one.
    #[serde(default)]
    pub artifact_substrings: BTreeSet<String>,
    /// Multi-token runs removed when they appear consecutively.
    #[serde(default = "default_artifact_sequences")]
    pub artifact_sequences: Vec<Vec<String>>,
    #[serde(default = "default_zwj_policy")]
    pub zwj_policy: ZwjPolicy,
}

fn default_true() -> bool {
    true
}

fn default_punctuation_policy() -> PunctuationPolicy {
    PunctuationPolicy::DiacriticSafe
}

fn default_zwj_policy() -> ZwjPolicy {
    ZwjPolicy::PreserveContextual
}

fn default_apostrophes() -> BTreeSet<char> {
    ['\'', '\u{2019}'].into_iter().collect()
}

fn default_whitelist() -> BTreeSet<ScriptClass> {
    [ScriptClass::Sinhala, ScriptClass::Zwj, ScriptClass::Whitespace]
        .into_iter()
        .collect()
}

fn default_artifact_tokens() -> BTreeSet<String> {
    [
        "featureyoutube",
        "indexph",
        "sundayrividaharahtml",
        "editionbreakingnewshtml",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

fn default_artifact_sequences() -> Vec<Vec<String>> {
    vec![["and", "pid", "and", "vid", "and", "page"]
        .into_iter()
        .map(String::from)
        .collect()]
}

impl CleaningConfig {
    /// Sinhala-only cleaning: strip URLs, artifacts and punctuation, then
    /// purge everything outside the Sinhala block except whitespace and
    /// contextual ZWJs.
    pub fn redux() -> Self {
        CleaningConfig {
            strip_urls: true,
            punctuation_policy: PunctuationPolicy::DiacriticSafe,
            apostrophe_chars: default_apostrophes(),
            script_whitelist: default_whitelist(),
            artifact_tokens: default_artifact_tokens(),
            artifact_substrings: BTreeSet::new(),
            artifact_sequences: default_artifact_sequences(),
            zwj_policy: ZwjPolicy::PreserveContextual,
        }
    }

    /// Re-establish the invariants after deserialization: the whitelist must
    /// contain Whitespace, and artifact tokens must not contain whitespace
    /// (entries that do are reinterpreted as token sequences).
    pub fn normalize(&mut self) {
        self.script_whitelist.insert(ScriptClass::Whitespace);
        let (tokens, sequences): (BTreeSet<String>, Vec<Vec<String>>) = {
            let mut tokens = BTreeSet::new();
            let mut sequences = self.artifact_sequences.clone();
            for entry in &self.artifact_tokens {
                let parts: Vec<String> = tokenize(entry).map(|t| t.text.to_string()).collect();
                match parts.len() {
                    0 => {}
                    1 => {
                        tokens.insert(parts.into_iter().next().unwrap());
                    }
                    _ => sequences.push(parts),
                }
            }
            (tokens, sequences)
        };
        self.artifact_tokens = tokens;
        self.artifact_sequences = sequences;
    }
}

impl Default for CleaningConfig {
    fn default() -> Self {
        CleaningConfig::redux()
    }
}

/// Counters for one cleaning run. Merging is associative and commutative, so
/// partition-parallel cleaning reports the same totals as a sequential pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub urls_removed: u64,
    pub codepoints_removed_by_class: BTreeMap<ScriptClass, u64>,
    pub artifact_tokens_removed: u64,
    pub posts_emptied: u64,
}

impl CleaningReport {
    pub fn merge(&mut self, other: &CleaningReport) {
        self.urls_removed += other.urls_removed;
        for (class, n) in &other.codepoints_removed_by_class {
            *self.codepoints_removed_by_class.entry(*class).or_insert(0) += n;
        }
        self.artifact_tokens_removed += other.artifact_tokens_removed;
        self.posts_emptied += other.posts_emptied;
    }
}

// URL shapes replaced by strip_urls: an explicit scheme or a www. prefix
// swallows the rest of the token; a bare domain must be a whole token ending
// in an alphabetic TLD of length >= 2, optionally with a /path.
static URL_SUBSTRING: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?:[A-Za-z][A-Za-z0-9+.-]*://|www\.)\S+").unwrap());
static BARE_DOMAIN_TOKEN: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"^[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}(?:/\S*)?$").unwrap()
});

/// Replace every URL with a single space, leaving all other text
/// byte-identical. Text containing no "://", "www.", or dot-tld token is
/// returned unchanged.
pub fn strip_urls(text: &str) -> String {
    strip_urls_counted(text).0
}

pub(crate) fn strip_urls_counted(text: &str) -> (String, u64) {
    let mut removed = 0u64;
    let pass1 = URL_SUBSTRING.replace_all(text, |_: &regex::Captures| {
        removed += 1;
        " "
    });
    let needs_token_pass = tokenize(&pass1).any(|t| BARE_DOMAIN_TOKEN.is_match(t.text));
    if !needs_token_pass {
        return (pass1.into_owned(), removed);
    }
    let mut out = String::with_capacity(pass1.len());
    let mut pos = 0;
    for token in tokenize(&pass1) {
        if BARE_DOMAIN_TOKEN.is_match(token.text) {
            out.push_str(&pass1[pos..token.byte_offset]);
            out.push(' ');
            pos = token.byte_offset + token.text.len();
            removed += 1;
        }
    }
    out.push_str(&pass1[pos..]);
    (out, removed)
}

/// Apply the diacritic-safe punctuation rule. With the policy off, the text
/// is returned unchanged.
pub fn strip_punctuation(text: &str, config: &CleaningConfig) -> String {
    strip_punctuation_counted(text, config).0
}

pub(crate) fn strip_punctuation_counted(text: &str, config: &CleaningConfig) -> (String, u64) {
    if config.punctuation_policy == PunctuationPolicy::Off {
        return (text.to_string(), 0);
    }
    let mut out = String::with_capacity(text.len());
    let mut removed = 0u64;
    for c in text.chars() {
        if classify_codepoint(c) == ScriptClass::Punctuation {
            removed += 1;
            if !config.apostrophe_chars.contains(&c) {
                out.push(' ');
            }
        } else {
            out.push(c);
        }
    }
    (out, removed)
}

// A ZWJ counts as virama-adjacent when the scalar before it is the virama
// itself or one of the precomposed vowel signs whose canonical decomposition
// ends in the virama (U+0DDA, U+0DDD). Without the precomposed forms, NFC
// normalization could compose the virama away and a second cleaning pass
// would disagree with the first.
fn carries_trailing_virama(c: char) -> bool {
    matches!(c, VIRAMA | '\u{0DDA}' | '\u{0DDD}')
}

/// Replace every scalar whose class is outside the whitelist with a single
/// space. A ZWJ survives only under `ZwjPolicy::PreserveContextual` and only
/// in Sinhala ligature context.
pub fn filter_scripts(text: &str, config: &CleaningConfig) -> String {
    filter_scripts_counted(text, config).0
}

pub(crate) fn filter_scripts_counted(
    text: &str,
    config: &CleaningConfig,
) -> (String, BTreeMap<ScriptClass, u64>) {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut removed: BTreeMap<ScriptClass, u64> = BTreeMap::new();
    for (i, &c) in chars.iter().enumerate() {
        let class = classify_codepoint(c);
        let keep = if c == ZWJ {
            config.script_whitelist.contains(&ScriptClass::Zwj)
                && config.zwj_policy == ZwjPolicy::PreserveContextual
                && (i
                    .checked_sub(1)
                    .is_some_and(|p| carries_trailing_virama(chars[p]))
                    || chars
                        .get(i + 1)
                        .is_some_and(|&n| classify_codepoint(n) == ScriptClass::Sinhala))
        } else {
            config.script_whitelist.contains(&class)
        };
        if keep {
            out.push(c);
        } else {
            *removed.entry(class).or_insert(0) += 1;
            out.push(' ');
        }
    }
    (out, removed)
}

/// Remove platform-artifact tokens (exact, substring, and multi-token
/// sequences per the config). One whitespace separator is consumed with each
/// removed run; text without artifacts comes back unchanged.
pub fn remove_artifact_tokens(text: &str, config: &CleaningConfig) -> String {
    remove_artifact_tokens_counted(text, config).0
}

pub(crate) fn remove_artifact_tokens_counted(
    text: &str,
    config: &CleaningConfig,
) -> (String, u64) {
    let tokens: Vec<crate::unicode_text::Token> = tokenize(text).collect();
    if tokens.is_empty() {
        return (text.to_string(), 0);
    }
    let mut marked = vec![false; tokens.len()];
    for (i, token) in tokens.iter().enumerate() {
        if config.artifact_tokens.contains(token.text)
            || config
                .artifact_substrings
                .iter()
                .any(|s| token.text.contains(s.as_str()))
        {
            marked[i] = true;
        }
    }
    for seq in &config.artifact_sequences {
        if seq.is_empty() || seq.len() > tokens.len() {
            continue;
        }
        let mut i = 0;
        while i + seq.len() <= tokens.len() {
            if tokens[i..i + seq.len()]
                .iter()
                .zip(seq)
                .all(|(t, s)| t.text == s)
            {
                marked[i..i + seq.len()].iter_mut().for_each(|m| *m = true);
                i += seq.len();
            } else {
                i += 1;
            }
        }
    }
    let removed = marked.iter().filter(|&&m| m).count() as u64;
    if removed == 0 {
        return (text.to_string(), 0);
    }

    // Byte ranges to cut: each maximal run of marked tokens plus the
    // whitespace run after it (or before it, at end of text).
    let mut cuts: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !marked[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < tokens.len() && marked[j + 1] {
            j += 1;
        }
        let mut start = tokens[i].byte_offset;
        let mut end = tokens[j].byte_offset + tokens[j].text.len();
        if j + 1 < tokens.len() {
            end = tokens[j + 1].byte_offset;
        } else if end == text.len() && i > 0 {
            start = tokens[i - 1].byte_offset + tokens[i - 1].text.len();
        } else {
            end = text.len();
        }
        cuts.push((start, end));
        i = j + 1;
    }
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for (start, end) in cuts {
        out.push_str(&text[pos..start]);
        pos = end;
    }
    out.push_str(&text[pos..]);
    (out, removed)
}

/// Collapse whitespace runs to single spaces, trim the ends, and return the
/// result in NFC.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, word) in text.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word);
    }
    nfc_string(&out)
}

fn nfc_string(text: &str) -> String {
    if is_nfc(text) {
        text.to_string()
    } else {
        text.nfc().collect()
    }
}

/// Clean one record: URLs, artifacts, punctuation, scripts, whitespace — in
/// that order. Returns `None` (and counts the post as emptied) when nothing
/// is left of the message.
///
/// The input is brought to NFC up front so the ZWJ context decisions are
/// stable; `clean_post` is idempotent for any fixed config.
pub fn clean_post(record: PostRecord, config: &CleaningConfig) -> (Option<PostRecord>, CleaningReport) {
    let mut report = CleaningReport::default();
    let mut message = nfc_string(&record.message);
    if config.strip_urls {
        let (text, urls) = strip_urls_counted(&message);
        report.urls_removed += urls;
        message = text;
    }
    let (text, artifacts) = remove_artifact_tokens_counted(&message, config);
    report.artifact_tokens_removed += artifacts;
    message = text;
    let (text, punct) = strip_punctuation_counted(&message, config);
    if punct > 0 {
        *report
            .codepoints_removed_by_class
            .entry(ScriptClass::Punctuation)
            .or_insert(0) += punct;
    }
    message = text;
    let (text, removed) = filter_scripts_counted(&message, config);
    for (class, n) in removed {
        *report.codepoints_removed_by_class.entry(class).or_insert(0) += n;
    }
    message = normalize_whitespace(&text);
    if message.is_empty() {
        report.posts_emptied += 1;
        (None, report)
    } else {
        (Some(PostRecord { message, ..record }), report)
    }
}

/// Read an artifact-token list: one entry per line, blank lines skipped.
/// Lines with internal whitespace are token sequences.
pub fn parse_artifact_list(text: &str) -> (BTreeSet<String>, Vec<Vec<String>>) {
    let mut tokens = BTreeSet::new();
    let mut sequences = Vec::new();
    for line in text.lines() {
        let parts: Vec<String> = tokenize(line).map(|t| t.text.to_string()).collect();
        match parts.len() {
            0 => {}
            1 => {
                tokens.insert(parts.into_iter().next().unwrap());
            }
            _ => sequences.push(parts),
        }
    }
    (tokens, sequences)
}
