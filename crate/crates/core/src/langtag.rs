//! Language predictions: importing external annotations, a built-in
//! script-histogram tagger, and codemix accounting.
//!
//! The built-in tagger is deliberately script-deterministic rather than an
//! n-gram model: for the Sinhala/Tamil/English triad, script identity nearly
//! determines the language, and it avoids the noisy labels neural classifiers
//! assign to codemixed text. Latin script mapping to "en" is a stated
//! approximation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::PostRecord;
use crate::unicode_text::{classify_codepoint, ScriptClass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TagError {
    #[error("record {index}: malformed annotation: {reason}")]
    MalformedAnnotation { index: usize, reason: String },
    #[error("annotation column has {values} values for {records} records")]
    ColumnLengthMismatch { records: usize, values: usize },
    #[error("cannot predict language of empty text")]
    EmptyText,
    #[error("no record carries a language prediction")]
    NoAnnotations,
}

/// Top-2 language prediction: one or two (label, score) pairs with
/// non-increasing scores in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LangPrediction {
    labels: Vec<(String, f64)>,
}

impl LangPrediction {
    pub fn new(labels: Vec<(String, f64)>) -> Result<LangPrediction, String> {
        if labels.is_empty() || labels.len() > 2 {
            return Err(format!("expected 1 or 2 labels, got {}", labels.len()));
        }
        for (label, score) in &labels {
            if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == ':' || c == ',') {
                return Err(format!("bad label {label:?}"));
            }
            if !(0.0..=1.0).contains(score) {
                return Err(format!("score {score} out of [0, 1]"));
            }
        }
        if labels.len() == 2 && labels[0].1 < labels[1].1 {
            return Err("scores must be non-increasing".to_string());
        }
        Ok(LangPrediction { labels })
    }

    /// Parse the wire form `label:score` or `label:score,label:score`.
    pub fn parse(raw: &str) -> Result<LangPrediction, String> {
        let mut labels = Vec::new();
        for part in raw.trim().split(',') {
            let (label, score) = part
                .split_once(':')
                .ok_or_else(|| format!("expected label:score, got {part:?}"))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| format!("bad score in {part:?}"))?;
            labels.push((label.trim().to_string(), score));
        }
        LangPrediction::new(labels)
    }

    pub fn labels(&self) -> &[(String, f64)] {
        &self.labels
    }

    pub fn has_label(&self, code: &str) -> bool {
        self.labels.iter().any(|(label, _)| label == code)
    }

    pub fn top(&self) -> &str {
        &self.labels[0].0
    }
}

impl fmt::Display for LangPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (label, score)) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{label}:{score}")?;
        }
        Ok(())
    }
}

/// Per-class scalar counts over the non-whitespace scalars of a text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScriptHistogram {
    pub counts: BTreeMap<ScriptClass, u64>,
}

impl ScriptHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Count non-whitespace scalars of `text` by class.
pub fn script_histogram(text: &str) -> ScriptHistogram {
    let mut counts = BTreeMap::new();
    for c in text.chars() {
        let class = classify_codepoint(c);
        if class != ScriptClass::Whitespace {
            *counts.entry(class).or_insert(0) += 1;
        }
    }
    ScriptHistogram { counts }
}

// Script classes that map to a language label, in tie-break order.
const LABELED_CLASSES: [(ScriptClass, &str); 4] = [
    (ScriptClass::Sinhala, "si"),
    (ScriptClass::Tamil, "ta"),
    (ScriptClass::Latin, "en"),
    (ScriptClass::Han, "zh"),
];

/// Predict the top-2 languages of a text from its script histogram. Scores
/// are each class's share of all non-whitespace scalars; ties break in the
/// fixed order si, ta, en, zh. Text with none of the labeled scripts gets
/// "und" with score 1.
pub fn predict_top2(text: &str) -> Result<LangPrediction, TagError> {
    if text.trim().is_empty() {
        return Err(TagError::EmptyText);
    }
    let histogram = script_histogram(text);
    let total = histogram.total();
    let mut present: Vec<(&str, u64)> = LABELED_CLASSES
        .iter()
        .filter_map(|(class, label)| {
            histogram
                .counts
                .get(class)
                .filter(|&&n| n > 0)
                .map(|&n| (*label, n))
        })
        .collect();
    if present.is_empty() {
        return Ok(LangPrediction {
            labels: vec![("und".to_string(), 1.0)],
        });
    }
    // Stable sort keeps the fixed label order among equal counts.
    present.sort_by_key(|&(_, count)| std::cmp::Reverse(count));
    let labels = present
        .into_iter()
        .take(2)
        .map(|(label, n)| (label.to_string(), n as f64 / total as f64))
        .collect();
    Ok(LangPrediction { labels })
}

/// Attach annotations from a parallel column of raw values. Records without
/// a value keep their existing prediction state.
pub fn import_annotations(
    mut records: Vec<PostRecord>,
    column: &[Option<String>],
) -> Result<Vec<PostRecord>, TagError> {
    if records.len() != column.len() {
        return Err(TagError::ColumnLengthMismatch {
            records: records.len(),
            values: column.len(),
        });
    }
    for (index, (record, value)) in records.iter_mut().zip(column).enumerate() {
        if let Some(raw) = value {
            let parsed = LangPrediction::parse(raw)
                .map_err(|reason| TagError::MalformedAnnotation { index, reason })?;
            record.lang_prediction = Some(parsed);
        }
    }
    Ok(records)
}

/// Codemix accounting over Sinhala-tagged posts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CodemixStats {
    /// Posts whose prediction includes "si".
    pub sinhala_tagged: u64,
    /// Of those, posts also tagged "en".
    pub also_english: u64,
    /// Of those, posts also tagged "en" or containing a Latin-class scalar.
    pub also_latinate: u64,
    pub latinate_ratio: f64,
}

/// Compute codemix statistics over the records that carry predictions.
pub fn codemix_stats(records: &[PostRecord]) -> Result<CodemixStats, TagError> {
    let mut any = false;
    let mut stats = CodemixStats::default();
    for record in records {
        let Some(prediction) = &record.lang_prediction else {
            continue;
        };
        any = true;
        if !prediction.has_label("si") {
            continue;
        }
        stats.sinhala_tagged += 1;
        let tagged_en = prediction.has_label("en");
        let has_latin = record
            .message
            .chars()
            .any(|c| classify_codepoint(c) == ScriptClass::Latin);
        if tagged_en {
            stats.also_english += 1;
        }
        if tagged_en || has_latin {
            stats.also_latinate += 1;
        }
    }
    if !any {
        return Err(TagError::NoAnnotations);
    }
    if stats.sinhala_tagged > 0 {
        stats.latinate_ratio = stats.also_latinate as f64 / stats.sinhala_tagged as f64;
    }
    Ok(stats)
}
