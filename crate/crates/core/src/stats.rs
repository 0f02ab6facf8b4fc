//! Corpus descriptive statistics: word-count quantiles, contributor tables,
//! unigram and adjacent-pair frequency tables.
//!
//! Words are compared by exact scalar sequence after NFC — no case folding
//! (Sinhala has no case, and folding Latin would distort mixed-corpus
//! counts). Counting obeys a merge law: tables built over partitions of a
//! record set and merged pointwise equal the table built over the whole set.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::{is_nfc, UnicodeNormalization};

use crate::ingest::PostRecord;
use crate::unicode_text::{tokenize, word_count};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty corpus: no records to summarize")]
    EmptyCorpus,
}

fn nfc_token(token: &str) -> String {
    if is_nfc(token) {
        token.to_string()
    } else {
        token.nfc().collect()
    }
}

/// Word frequency counts with totals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total_tokens: u64,
}

impl FrequencyTable {
    pub fn from_counts<I: IntoIterator<Item = (String, u64)>>(entries: I) -> FrequencyTable {
        let mut table = FrequencyTable::default();
        for (word, count) in entries {
            if count > 0 {
                *table.counts.entry(word).or_insert(0) += count;
                table.total_tokens += count;
            }
        }
        table
    }

    pub fn add_token(&mut self, token: &str) {
        *self.counts.entry(nfc_token(token)).or_insert(0) += 1;
        self.total_tokens += 1;
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn unique_words(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Pointwise-additive merge.
    pub fn merge(&mut self, other: FrequencyTable) {
        for (word, count) in other.counts {
            *self.counts.entry(word).or_insert(0) += count;
        }
        self.total_tokens += other.total_tokens;
    }

    /// Entries sorted by count descending, ties by word ascending in scalar
    /// order. `top_n` is a prefix of this.
    pub fn sorted_entries(&self) -> Vec<(&str, u64)> {
        let mut entries: Vec<(&str, u64)> = self.iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        entries
    }

    pub fn top_n(&self, n: usize) -> Vec<(String, u64)> {
        self.sorted_entries()
            .into_iter()
            .take(n)
            .map(|(w, c)| (w.to_string(), c))
            .collect()
    }

    /// TSV export: `word<TAB>count`, full table in sorted order, UTF-8, NFC.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> io::Result<()> {
        for (word, count) in self.sorted_entries() {
            writeln!(sink, "{word}\t{count}")?;
        }
        Ok(())
    }

    /// Read the TSV form back.
    pub fn read_tsv<R: BufRead>(reader: R) -> io::Result<FrequencyTable> {
        let mut table = FrequencyTable::default();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (word, count) = line.rsplit_once('\t').ok_or_else(|| {
                io::Error::new(io::ErrorKind::InvalidData, format!("bad TSV line {line:?}"))
            })?;
            let count: u64 = count.trim().parse().map_err(|_| {
                io::Error::new(io::ErrorKind::InvalidData, format!("bad count in {line:?}"))
            })?;
            if count > 0 {
                *table.counts.entry(word.to_string()).or_insert(0) += count;
                table.total_tokens += count;
            }
        }
        Ok(table)
    }
}

/// Adjacent ordered word-pair counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BigramTable {
    counts: HashMap<(String, String), u64>,
    total_pairs: u64,
}

impl BigramTable {
    pub fn add_pair(&mut self, first: &str, second: &str) {
        *self
            .counts
            .entry((nfc_token(first), nfc_token(second)))
            .or_insert(0) += 1;
        self.total_pairs += 1;
    }

    pub fn get(&self, first: &str, second: &str) -> u64 {
        self.counts
            .get(&(first.to_string(), second.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total_pairs(&self) -> u64 {
        self.total_pairs
    }

    pub fn unique_pairs(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn merge(&mut self, other: BigramTable) {
        for (pair, count) in other.counts {
            *self.counts.entry(pair).or_insert(0) += count;
        }
        self.total_pairs += other.total_pairs;
    }

    pub fn sorted_entries(&self) -> Vec<(&(String, String), u64)> {
        let mut entries: Vec<(&(String, String), u64)> =
            self.counts.iter().map(|(p, &c)| (p, c)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        entries
    }

    pub fn top_n(&self, n: usize) -> Vec<((String, String), u64)> {
        self.sorted_entries()
            .into_iter()
            .take(n)
            .map(|(pair, c)| (pair.clone(), c))
            .collect()
    }

    /// TSV export: `word1<SPACE>word2<TAB>count`.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> io::Result<()> {
        for ((first, second), count) in self.sorted_entries() {
            writeln!(sink, "{first} {second}\t{count}")?;
        }
        Ok(())
    }
}

/// Count words across all records.
pub fn unigram_frequencies(records: &[PostRecord]) -> FrequencyTable {
    let mut table = FrequencyTable::default();
    for record in records {
        for token in tokenize(&record.message) {
            table.add_token(token.text);
        }
    }
    table
}

/// Count adjacent ordered token pairs within each post (never across posts).
pub fn bigram_frequencies(records: &[PostRecord]) -> BigramTable {
    let mut table = BigramTable::default();
    for record in records {
        let mut tokens = tokenize(&record.message);
        let Some(mut previous) = tokens.next() else {
            continue;
        };
        for token in tokens {
            table.add_pair(previous.text, token.text);
            previous = token;
        }
    }
    table
}

/// Word-count distribution at the 0/25/50/75/100% quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileSummary {
    pub q0: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q100: f64,
}

/// Linear-interpolation ("type 7") quantile of sorted data: with 1-based
/// h = (n − 1)p + 1, Q = x_⌊h⌋ + (h − ⌊h⌋)(x_⌊h⌋₊₁ − x_⌊h⌋).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let n = sorted.len();
    let h = (n as f64 - 1.0) * p + 1.0;
    let lo = h.floor() as usize;
    let frac = h - h.floor();
    if lo >= n {
        return sorted[n - 1];
    }
    let low = sorted[lo - 1];
    if frac == 0.0 {
        low
    } else {
        low + frac * (sorted[lo] - low)
    }
}

/// Quantiles of per-post word counts.
pub fn wordcount_quantiles(records: &[PostRecord]) -> Result<QuantileSummary, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let mut counts: Vec<f64> = records
        .iter()
        .map(|r| word_count(&r.message) as f64)
        .collect();
    counts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(QuantileSummary {
        q0: quantile(&counts, 0.0),
        q25: quantile(&counts, 0.25),
        q50: quantile(&counts, 0.5),
        q75: quantile(&counts, 0.75),
        q100: quantile(&counts, 1.0),
    })
}

/// Pages by post count descending, ties by page name ascending; first `n`.
pub fn contributor_table(records: &[PostRecord], n: usize) -> Vec<(String, u64)> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for record in records {
        *counts.entry(record.page_name.as_str()).or_insert(0) += 1;
    }
    let mut entries: Vec<(&str, u64)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    entries
        .into_iter()
        .take(n)
        .map(|(page, count)| (page.to_string(), count))
        .collect()
}

/// Total words across all records.
pub fn total_word_count(records: &[PostRecord]) -> u64 {
    records.iter().map(|r| word_count(&r.message) as u64).sum()
}
