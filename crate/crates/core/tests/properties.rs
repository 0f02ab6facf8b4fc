//! Property tests for the library invariants: serialization round-trips,
//! tokenization laws, Sinhala-safety of cleaning, counter merge laws, the
//! quantile estimator against a brute-force oracle, and stopword selection
//! against an exact rational-arithmetic reference.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use corpora_core::cleaning::{
    clean_post, normalize_whitespace, strip_punctuation, strip_urls, CleaningConfig,
};
use corpora_core::ingest::{
    drop_empty_messages, filter_pages, parse_records, write_csv, write_jsonl, ContentType,
    InputFormat, PostRecord,
};
use corpora_core::langtag::{codemix_stats, predict_top2, script_histogram, LangPrediction};
use corpora_core::stats::{
    bigram_frequencies, quantile, unigram_frequencies, wordcount_quantiles, FrequencyTable,
};
use corpora_core::stopwords::{derive_stopwords, StopwordError};
use corpora_core::unicode_text::{classify_codepoint, tokenize, word_count, ScriptClass};

const SRI: &str = "ශ\u{0DCA}\u{200D}රී";

// ---------- generators ----------

fn any_date() -> impl Strategy<Value = NaiveDate> {
    (1970i32..=2069, 1u32..=12, 1u32..=28)
        .prop_map(|(y, m, d)| NaiveDate::from_ymd_opt(y, m, d).unwrap())
}

fn page_name() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[!-~]([ -~]{0,10}[!-~])?").unwrap()
}

fn content_type() -> impl Strategy<Value = ContentType> {
    prop_oneof![
        proptest::sample::select(vec![
            ContentType::YouTube,
            ContentType::Status,
            ContentType::Link,
            ContentType::Photo,
            ContentType::NativeVideo,
            ContentType::Video,
            ContentType::Vine,
            ContentType::LiveVideoComplete,
            ContentType::LiveVideo,
        ]),
        // Canonicalize arbitrary labels through the parser.
        proptest::string::string_regex("[!-~]{1,8}").unwrap()
            .prop_map(|s| ContentType::from_label(&s)),
    ]
}

fn lang_prediction() -> impl Strategy<Value = Option<LangPrediction>> {
    let label = proptest::sample::select(vec!["si", "en", "ta", "zh", "und", "ca"]);
    prop_oneof![
        Just(None),
        (label.clone(), 0.0f64..=1.0).prop_map(|(l, s)| {
            Some(LangPrediction::new(vec![(l.to_string(), s)]).unwrap())
        }),
        (label.clone(), label, 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(l1, l2, a, b)| {
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            Some(LangPrediction::new(vec![(l1.to_string(), hi), (l2.to_string(), lo)]).unwrap())
        }),
    ]
}

fn text_fragment() -> impl Strategy<Value = String> {
    prop_oneof![
        proptest::sample::select(vec![
            "අ", "ද", "ක", "ම", "න", "ත", "ල", "ර", "ස", "ග", "\u{0DCA}", "\u{0DD2}",
            "\u{0DCF}", "\u{0DDA}", "ං",
        ])
        .prop_map(String::from),
        Just(SRI.to_string()),
        Just("ක\u{0DCA}\u{200D}ය".to_string()),
        Just("\u{200D}".to_string()),
        proptest::sample::select(vec!["a", "b", "Z", "é", "t"]).prop_map(String::from),
        proptest::sample::select(vec!["த", "ம", "ழ"]).prop_map(String::from),
        proptest::sample::select(vec!["0", "7", "9"]).prop_map(String::from),
        proptest::sample::select(vec![".", ",", "!", "?", "'", "\u{2019}", "(", ")", "…", ":"])
            .prop_map(String::from),
        proptest::sample::select(vec!["😀", "❤", "☔", "中", "💯"]).prop_map(String::from),
        proptest::sample::select(vec![" ", "  ", "\t", "\n", "\u{00A0}"]).prop_map(String::from),
        Just("http://news.lk/a.html".to_string()),
        Just("www.adaderana.lk".to_string()),
    ]
}

fn mixed_text() -> impl Strategy<Value = String> {
    proptest::collection::vec(text_fragment(), 0..16).prop_map(|v| v.concat())
}

fn post_record() -> impl Strategy<Value = PostRecord> {
    (page_name(), any_date(), content_type(), mixed_text(), lang_prediction()).prop_map(
        |(page_name, created, content_type, message, lang_prediction)| PostRecord {
            page_name,
            created,
            content_type,
            message,
            lang_prediction,
        },
    )
}

// ---------- ingest ----------

proptest! {
    #[test]
    fn jsonl_round_trip(records in proptest::collection::vec(post_record(), 0..8)) {
        let mut buf = Vec::new();
        write_jsonl(&records, &mut buf).unwrap();
        let (back, report) = parse_records(&buf[..], InputFormat::Jsonl).unwrap();
        prop_assert_eq!(&back, &records);
        prop_assert_eq!(report.records_read, records.len() as u64);
    }

    #[test]
    fn csv_round_trip(records in proptest::collection::vec(post_record(), 0..8)) {
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let (back, _) = parse_records(&buf[..], InputFormat::Csv).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn content_type_round_trips(label in "[ -~]{0,12}") {
        let parsed = ContentType::from_label(&label);
        prop_assert_eq!(ContentType::from_label(parsed.label()), parsed);
    }

    #[test]
    fn drop_empty_is_idempotent(records in proptest::collection::vec(post_record(), 0..12)) {
        let (once, report1) = drop_empty_messages(records);
        prop_assert_eq!(
            report1.records_read,
            report1.records_kept + report1.records_dropped_empty + report1.records_dropped_blacklist
        );
        let (twice, report2) = drop_empty_messages(once.clone());
        prop_assert_eq!(twice, once);
        prop_assert_eq!(report2.records_dropped_empty, 0);
    }

    #[test]
    fn filter_pages_splits_over_union(
        records in proptest::collection::vec(post_record(), 0..12),
        a in proptest::collection::btree_set("[a-d]", 0..3),
        b in proptest::collection::btree_set("[c-f]", 0..3),
    ) {
        let union: BTreeSet<String> = a.union(&b).cloned().collect();
        let (direct, _) = filter_pages(records.clone(), &union);
        let (step1, _) = filter_pages(records, &a);
        let (step2, _) = filter_pages(step1, &b);
        prop_assert_eq!(direct, step2);
    }
}

// ---------- unicode_text ----------

proptest! {
    #[test]
    fn classification_is_total(c in proptest::char::any()) {
        // Must not panic, and ZWJ/Sinhala block equivalences hold.
        let class = classify_codepoint(c);
        let v = c as u32;
        prop_assert_eq!(class == ScriptClass::Zwj, v == 0x200D);
        prop_assert_eq!(
            class == ScriptClass::Sinhala,
            (0x0D80..=0x0DFF).contains(&v)
        );
    }

    #[test]
    fn rejoin_and_retokenize_is_stable(text in mixed_text()) {
        let tokens: Vec<String> = tokenize(&text).map(|t| t.text.to_string()).collect();
        let rejoined = tokens.join(" ");
        let again: Vec<String> = tokenize(&rejoined).map(|t| t.text.to_string()).collect();
        prop_assert_eq!(tokens, again);
    }

    #[test]
    fn tokens_cover_all_non_whitespace(text in mixed_text()) {
        let concatenated: String = tokenize(&text).map(|t| t.text).collect();
        let without_ws: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(concatenated, without_ws);
    }

    #[test]
    fn word_count_sum_is_permutation_invariant(
        texts in proptest::collection::vec(mixed_text(), 0..8).prop_shuffle()
    ) {
        let mut sorted = texts.clone();
        sorted.sort();
        let sum: usize = texts.iter().map(|t| word_count(t)).sum();
        let sorted_sum: usize = sorted.iter().map(|t| word_count(t)).sum();
        prop_assert_eq!(sum, sorted_sum);
    }
}

// ---------- cleaning ----------

fn sinhala_multiset(text: &str) -> BTreeMap<char, usize> {
    let mut counts = BTreeMap::new();
    for c in text.chars() {
        if classify_codepoint(c) == ScriptClass::Sinhala {
            *counts.entry(c).or_insert(0) += 1;
        }
    }
    counts
}

fn carries_trailing_virama(c: char) -> bool {
    matches!(c, '\u{0DCA}' | '\u{0DDA}' | '\u{0DDD}')
}

fn record_with(message: &str) -> PostRecord {
    PostRecord {
        page_name: "P".to_string(),
        created: NaiveDate::from_ymd_opt(2015, 5, 5).unwrap(),
        content_type: ContentType::Status,
        message: message.to_string(),
        lang_prediction: None,
    }
}

proptest! {
    #[test]
    fn strip_punctuation_preserves_sinhala_multiset(text in mixed_text()) {
        let cfg = CleaningConfig::redux();
        let out = strip_punctuation(&text, &cfg);
        prop_assert_eq!(sinhala_multiset(&text), sinhala_multiset(&out));
    }

    #[test]
    fn redux_output_charset(text in mixed_text()) {
        let cfg = CleaningConfig::redux();
        let (cleaned, _) = clean_post(record_with(&text), &cfg);
        if let Some(record) = cleaned {
            let chars: Vec<char> = record.message.chars().collect();
            for (i, &c) in chars.iter().enumerate() {
                let ok = match classify_codepoint(c) {
                    ScriptClass::Sinhala => true,
                    ScriptClass::Zwj => {
                        i.checked_sub(1).is_some_and(|p| carries_trailing_virama(chars[p]))
                            || chars.get(i + 1).is_some_and(|&n| {
                                classify_codepoint(n) == ScriptClass::Sinhala
                            })
                    }
                    _ => c == ' ',
                };
                prop_assert!(ok, "scalar {:?} at {} in {:?}", c, i, record.message);
            }
        }
    }

    #[test]
    fn clean_post_is_idempotent(text in mixed_text()) {
        let cfg = CleaningConfig::redux();
        let (once, _) = clean_post(record_with(&text), &cfg);
        if let Some(first) = once {
            let (twice, _) = clean_post(first.clone(), &cfg);
            prop_assert_eq!(twice.map(|r| r.message), Some(first.message));
        }
    }

    #[test]
    fn padded_sri_survives_cleaning(
        before in mixed_text(),
        after in mixed_text(),
    ) {
        let cfg = CleaningConfig::redux();
        let text = format!("{before} {SRI} {after}");
        let (cleaned, _) = clean_post(record_with(&text), &cfg);
        let message = cleaned.expect("message containing sri cannot clean to empty").message;
        prop_assert!(message.contains(SRI), "lost {:?} in {:?}", SRI, message);
    }

    #[test]
    fn strip_urls_no_match_guarantee(text in mixed_text()) {
        // Over-approximation of "dot-tld token": the part before any /path
        // ends in .tld with an alphabetic tld of length >= 2.
        let tld_like = |token: &str| {
            let head = token.split('/').next().unwrap_or(token);
            head.rsplit_once('.').is_some_and(|(_, tld)| {
                tld.len() >= 2 && tld.chars().all(|c| c.is_ascii_alphabetic())
            })
        };
        let has_url_shape = text.contains("://")
            || text.contains("www.")
            || tokenize(&text).any(|t| tld_like(t.text));
        if !has_url_shape {
            prop_assert_eq!(strip_urls(&text), text);
        }
    }

    #[test]
    fn normalize_whitespace_is_idempotent(text in mixed_text()) {
        let once = normalize_whitespace(&text);
        prop_assert_eq!(normalize_whitespace(&once), once);
    }
}

// ---------- langtag ----------

proptest! {
    #[test]
    fn predict_scores_are_exact_shares(text in mixed_text()) {
        if text.trim().is_empty() {
            return Ok(());
        }
        let histogram = script_histogram(&text);
        let total = histogram.total();
        let prediction = predict_top2(&text).unwrap();
        let class_count = |label: &str| {
            let class = match label {
                "si" => ScriptClass::Sinhala,
                "ta" => ScriptClass::Tamil,
                "en" => ScriptClass::Latin,
                "zh" => ScriptClass::Han,
                _ => return None,
            };
            histogram.counts.get(&class).copied()
        };
        let mut score_sum = 0.0;
        for (label, score) in prediction.labels() {
            score_sum += score;
            if label == "und" {
                prop_assert_eq!(*score, 1.0);
            } else {
                let count = class_count(label).unwrap_or(0);
                prop_assert_eq!(*score, count as f64 / total as f64);
            }
        }
        prop_assert!(score_sum <= 1.0 + 1e-12);
    }

    #[test]
    fn single_script_scores_one(n in 1usize..6) {
        let text = "අද".repeat(n);
        let prediction = predict_top2(&text).unwrap();
        prop_assert_eq!(prediction.labels(), &[("si".to_string(), 1.0)][..]);
    }

    #[test]
    fn codemix_counts_are_ordered(records in proptest::collection::vec(post_record(), 1..16)) {
        match codemix_stats(&records) {
            Ok(stats) => {
                prop_assert!(stats.also_english <= stats.also_latinate);
                prop_assert!(stats.also_latinate <= stats.sinhala_tagged);
            }
            Err(_) => {
                prop_assert!(records.iter().all(|r| r.lang_prediction.is_none()));
            }
        }
    }
}

// ---------- stats ----------

proptest! {
    #[test]
    fn counter_merge_law(
        records in proptest::collection::vec(post_record(), 0..16),
        split_seed in 0usize..17,
    ) {
        let split = split_seed.min(records.len());
        let (left, right) = records.split_at(split);

        let mut unigrams = unigram_frequencies(left);
        unigrams.merge(unigram_frequencies(right));
        prop_assert_eq!(unigrams, unigram_frequencies(&records));

        let mut bigrams = bigram_frequencies(left);
        bigrams.merge(bigram_frequencies(right));
        let whole = bigram_frequencies(&records);
        prop_assert_eq!(bigrams, whole.clone());

        let expected_pairs: u64 = records
            .iter()
            .map(|r| (word_count(&r.message) as u64).saturating_sub(1))
            .sum();
        prop_assert_eq!(whole.total_pairs(), expected_pairs);
    }

    #[test]
    fn quantile_matches_brute_force_oracle(
        values in proptest::collection::vec(0u32..1000, 1..200),
        p in 0.0f64..=1.0,
    ) {
        // Independent route: 0-based position and a convex combination.
        let mut sorted: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let w = pos - lo as f64;
        let oracle = sorted[lo] * (1.0 - w) + sorted[hi] * w;
        prop_assert!((quantile(&sorted, p) - oracle).abs() < 1e-12);
    }

    #[test]
    fn wordcount_quantiles_are_monotone(records in proptest::collection::vec(post_record(), 1..32)) {
        let summary = wordcount_quantiles(&records).unwrap();
        prop_assert!(summary.q0 <= summary.q25);
        prop_assert!(summary.q25 <= summary.q50);
        prop_assert!(summary.q50 <= summary.q75);
        prop_assert!(summary.q75 <= summary.q100);
        let counts: Vec<usize> = records.iter().map(|r| word_count(&r.message)).collect();
        prop_assert_eq!(summary.q0, *counts.iter().min().unwrap() as f64);
        prop_assert_eq!(summary.q100, *counts.iter().max().unwrap() as f64);
    }

    #[test]
    fn top_n_is_prefix_of_full_order(
        counts in proptest::collection::btree_map("[a-h]", 1u64..50, 0..8),
        k in 0usize..10,
    ) {
        let table = FrequencyTable::from_counts(counts.into_iter());
        let full = table.top_n(usize::MAX);
        let k = k.min(full.len());
        prop_assert_eq!(table.top_n(k), full[..k].to_vec());
    }
}

// ---------- stopwords: exact rational reference ----------

/// Brute-force reference: exact rational μ and variance, selecting x where
/// x ≥ μ and (x − μ)² ≥ t²·var (equivalent to z ≥ t for t > 0, σ > 0).
/// Returns None when the pruned table is empty or the variance is zero.
fn reference_selection(
    counts: &BTreeMap<String, u64>,
    min_freq: u64,
    threshold: BigRational,
) -> Option<BTreeSet<String>> {
    let pruned: Vec<(&String, u64)> = counts
        .iter()
        .filter(|(_, &c)| c >= min_freq)
        .map(|(w, &c)| (w, c))
        .collect();
    if pruned.is_empty() {
        return None;
    }
    let n = BigInt::from(pruned.len());
    let total: BigInt = pruned.iter().map(|(_, c)| BigInt::from(*c)).sum();
    let mu = BigRational::new(total, n.clone());
    let variance: BigRational = pruned
        .iter()
        .map(|(_, c)| {
            let d = BigRational::from_integer(BigInt::from(*c)) - &mu;
            &d * &d
        })
        .sum::<BigRational>()
        / BigRational::from_integer(n);
    if variance.is_zero() {
        return None;
    }
    let bound = &threshold * &threshold * &variance;
    Some(
        pruned
            .iter()
            .filter(|(_, c)| {
                let d = BigRational::from_integer(BigInt::from(*c)) - &mu;
                !d.is_negative() && &d * &d >= bound
            })
            .map(|(w, _)| (*w).clone())
            .collect(),
    )
}

proptest! {
    #[test]
    fn selection_matches_rational_reference(
        counts in proptest::collection::btree_map("[a-t]", 1u64..10_000, 1..20),
    ) {
        let table = FrequencyTable::from_counts(
            counts.iter().map(|(w, &c)| (w.clone(), c)),
        );
        let threshold = BigRational::new(BigInt::from(3), BigInt::from(2));
        let reference = reference_selection(&counts, 2, threshold);
        match derive_stopwords(&table, 2, 1.5) {
            Ok(report) => {
                let selected: BTreeSet<String> = report.selected.iter().cloned().collect();
                prop_assert_eq!(Some(selected), reference);
            }
            Err(StopwordError::EmptyVocabulary) | Err(StopwordError::SigmaZero) => {
                prop_assert_eq!(reference, None);
            }
        }
    }

    #[test]
    fn selection_is_scale_invariant(
        // Counts start at 2 so pruning is the identity on both tables.
        counts in proptest::collection::btree_map("[a-l]", 2u64..500, 2..12),
        factor in 2u64..50,
    ) {
        let table = FrequencyTable::from_counts(counts.iter().map(|(w, &c)| (w.clone(), c)));
        let scaled = FrequencyTable::from_counts(
            counts.iter().map(|(w, &c)| (w.clone(), c * factor)),
        );
        let base = derive_stopwords(&table, 2, 1.5);
        let scaled = derive_stopwords(&scaled, 2, 1.5);
        match (base, scaled) {
            (Ok(a), Ok(b)) => {
                let a: BTreeSet<String> = a.selected.into_iter().collect();
                let b: BTreeSet<String> = b.selected.into_iter().collect();
                prop_assert_eq!(a, b);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "diverged: {:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn selection_is_frequency_monotone(
        counts in proptest::collection::btree_map("[a-l]", 1u64..1000, 2..12),
    ) {
        let table = FrequencyTable::from_counts(counts.iter().map(|(w, &c)| (w.clone(), c)));
        if let Ok(report) = derive_stopwords(&table, 2, 1.5) {
            let selected: BTreeSet<&str> = report.selected.iter().map(|s| s.as_str()).collect();
            let min_selected = report
                .entries
                .iter()
                .filter(|e| selected.contains(e.word.as_str()))
                .map(|e| e.x)
                .min();
            if let Some(min_selected) = min_selected {
                for entry in &report.entries {
                    if entry.x > min_selected {
                        prop_assert!(selected.contains(entry.word.as_str()));
                    }
                }
            }
            // Standardized values renormalize to mean 0, population sd 1.
            let n = report.entries.len() as f64;
            let mean = report.entries.iter().map(|e| e.z).sum::<f64>() / n;
            let sd = (report.entries.iter().map(|e| (e.z - mean).powi(2)).sum::<f64>() / n).sqrt();
            prop_assert!(mean.abs() < 1e-9, "z mean {mean}");
            prop_assert!((sd - 1.0).abs() < 1e-9, "z sd {sd}");
        }
    }
}
