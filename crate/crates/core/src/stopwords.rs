//! Stopword derivation from a frequency table: prune hapax legomena,
//! standardize frequencies to z-scores, and select the upper tail.
//!
//! With z = (x − μ)/σ over the pruned vocabulary, words at z ≥ threshold
//! (default 1.5) are selected. On Zipf-shaped frequency data the lower tail
//! is empty — after hapax pruning no word sits 1.5 standard deviations below
//! the mean — so thresholding the upper tail and excluding a symmetric band
//! pick out the same set.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::stats::FrequencyTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StopwordError {
    #[error("empty vocabulary: no words left after pruning")]
    EmptyVocabulary,
    #[error("sigma is zero: uniform frequency distribution, no stopwords derivable")]
    SigmaZero,
}

/// Which standard-deviation convention to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdDevMode {
    /// Divide by N. The default.
    Population,
    /// Divide by N − 1, for sensitivity checks.
    Sample,
}

/// Mean and standard deviation of the word frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusMoments {
    pub mu: f64,
    pub sigma: f64,
    pub vocab_size: u64,
}

/// One word with its raw frequency and standard score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedFrequency {
    pub word: String,
    pub x: u64,
    pub z: f64,
}

/// The full derivation output: moments, every standardized entry, and the
/// selected stopwords in frequency-descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopwordReport {
    pub moments: CorpusMoments,
    pub threshold_z: f64,
    pub entries: Vec<StandardizedFrequency>,
    pub selected: Vec<String>,
}

/// Remove words with count below `min_freq` (default 2: hapax legomena go)
/// and recompute totals.
pub fn prune_hapax(table: &FrequencyTable, min_freq: u64) -> FrequencyTable {
    FrequencyTable::from_counts(
        table
            .iter()
            .filter(|&(_, count)| count >= min_freq)
            .map(|(word, count)| (word.to_string(), count)),
    )
}

/// Mean and population standard deviation of the table's frequencies.
pub fn corpus_moments(table: &FrequencyTable) -> Result<CorpusMoments, StopwordError> {
    corpus_moments_with(table, StdDevMode::Population)
}

pub fn corpus_moments_with(
    table: &FrequencyTable,
    mode: StdDevMode,
) -> Result<CorpusMoments, StopwordError> {
    let n = table.unique_words();
    if n == 0 {
        return Err(StopwordError::EmptyVocabulary);
    }
    let mu = table.total_tokens() as f64 / n as f64;
    // Sum in sorted-word order: float accumulation order must not depend on
    // hash-map iteration, or repeated runs would disagree in the last bits.
    let mut entries: Vec<(&str, u64)> = table.iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let sum_sq: f64 = entries
        .iter()
        .map(|&(_, count)| {
            let d = count as f64 - mu;
            d * d
        })
        .sum();
    let divisor = match mode {
        StdDevMode::Population => n as f64,
        StdDevMode::Sample => {
            if n == 1 {
                return Ok(CorpusMoments {
                    mu,
                    sigma: 0.0,
                    vocab_size: n,
                });
            }
            (n - 1) as f64
        }
    };
    Ok(CorpusMoments {
        mu,
        sigma: (sum_sq / divisor).sqrt(),
        vocab_size: n,
    })
}

/// Standard score z = (x − μ)/σ for every word.
pub fn standardize(
    table: &FrequencyTable,
    moments: &CorpusMoments,
) -> Result<Vec<StandardizedFrequency>, StopwordError> {
    if moments.sigma <= 0.0 {
        return Err(StopwordError::SigmaZero);
    }
    let mut entries: Vec<StandardizedFrequency> = table
        .iter()
        .map(|(word, x)| StandardizedFrequency {
            word: word.to_string(),
            x,
            z: (x as f64 - moments.mu) / moments.sigma,
        })
        .collect();
    entries.sort_by(|a, b| b.x.cmp(&a.x).then_with(|| a.word.cmp(&b.word)));
    Ok(entries)
}

/// Select every word with z ≥ `threshold_z`, ordered by raw frequency
/// descending, ties by word ascending. An empty selection is valid.
pub fn select_stopwords(
    entries: Vec<StandardizedFrequency>,
    moments: CorpusMoments,
    threshold_z: f64,
) -> StopwordReport {
    let mut entries = entries;
    entries.sort_by(|a, b| b.x.cmp(&a.x).then_with(|| a.word.cmp(&b.word)));
    let selected = entries
        .iter()
        .filter(|e| e.z >= threshold_z)
        .map(|e| e.word.clone())
        .collect();
    StopwordReport {
        moments,
        threshold_z,
        entries,
        selected,
    }
}

/// The whole chain: prune → moments → standardize → select.
pub fn derive_stopwords(
    table: &FrequencyTable,
    min_freq: u64,
    threshold_z: f64,
) -> Result<StopwordReport, StopwordError> {
    derive_stopwords_with(table, min_freq, threshold_z, StdDevMode::Population)
}

pub fn derive_stopwords_with(
    table: &FrequencyTable,
    min_freq: u64,
    threshold_z: f64,
    mode: StdDevMode,
) -> Result<StopwordReport, StopwordError> {
    let pruned = prune_hapax(table, min_freq);
    let moments = corpus_moments_with(&pruned, mode)?;
    let entries = standardize(&pruned, &moments)?;
    Ok(select_stopwords(entries, moments, threshold_z))
}

/// Write the selected stopwords one per line, UTF-8, NFC, frequency
/// descending, each line newline-terminated.
pub fn export_stopwords<W: Write>(report: &StopwordReport, mut sink: W) -> io::Result<()> {
    for word in &report.selected {
        let normalized: String = word.nfc().collect();
        sink.write_all(normalized.as_bytes())?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}
