//! Stage drivers shared by the individual subcommands and the two pipeline
//! presets. Running the stages one at a time over intermediate files yields
//! the same artifacts as one preset invocation.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use corpora_core::cleaning::{clean_post, strip_urls, CleaningConfig, CleaningReport};
use corpora_core::ingest::{
    drop_empty_messages, filter_pages, parse_records, write_jsonl, IngestReport, InputFormat,
    PostRecord,
};
use corpora_core::langtag::{codemix_stats, predict_top2, CodemixStats};
use corpora_core::stats::{
    bigram_frequencies, contributor_table, total_word_count, unigram_frequencies,
    wordcount_quantiles, FrequencyTable,
};
use corpora_core::stopwords::{derive_stopwords, export_stopwords, StopwordReport};

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::manifest::{OutputDir, RunManifest};

pub fn read_input(path: &Path, format: InputFormat) -> Result<(Vec<PostRecord>, IngestReport), CliError> {
    let file = File::open(path).map_err(CliError::io(format!("opening {}", path.display())))?;
    parse_records(BufReader::new(file), format)
        .map_err(|source| CliError::Parse { stage: "parse", source })
}

pub fn read_jsonl_records(path: &Path) -> Result<Vec<PostRecord>, CliError> {
    Ok(read_input(path, InputFormat::Jsonl)?.0)
}

/// Fill in missing language predictions with the built-in script tagger.
/// Records that already carry predictions keep them; empty messages stay
/// untagged.
pub fn tag_records(records: Vec<PostRecord>) -> Vec<PostRecord> {
    records
        .into_iter()
        .map(|mut record| {
            if record.lang_prediction.is_none() {
                if let Ok(prediction) = predict_top2(&record.message) {
                    record.lang_prediction = Some(prediction);
                }
            }
            record
        })
        .collect()
}

/// Keep records whose prediction includes `code`.
pub fn filter_language(records: Vec<PostRecord>, code: &str) -> Vec<PostRecord> {
    records
        .into_iter()
        .filter(|r| {
            r.lang_prediction
                .as_ref()
                .is_some_and(|p| p.has_label(code))
        })
        .collect()
}

/// Clean records, dropping the ones that come back empty. With more than one
/// worker the records are cleaned in parallel; outputs are byte-identical to
/// the single-threaded run because cleaning is pure and reports merge
/// associatively.
pub fn clean_records(
    records: Vec<PostRecord>,
    config: &CleaningConfig,
    workers: usize,
) -> Result<(Vec<PostRecord>, CleaningReport), CliError> {
    let cleaned: Vec<(Option<PostRecord>, CleaningReport)> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::Config(format!("building worker pool: {e}")))?;
        pool.install(|| records.into_par_iter().map(|r| clean_post(r, config)).collect())
    } else {
        records.into_iter().map(|r| clean_post(r, config)).collect()
    };
    let mut report = CleaningReport::default();
    let mut kept = Vec::with_capacity(cleaned.len());
    for (record, record_report) in cleaned {
        report.merge(&record_report);
        if let Some(record) = record {
            kept.push(record);
        }
    }
    Ok((kept, report))
}

/// Strip URLs from each message, leaving everything else byte-identical, and
/// drop records that become whitespace-only.
pub fn strip_urls_records(records: Vec<PostRecord>) -> (Vec<PostRecord>, u64, u64) {
    let mut urls_removed = 0;
    let mut emptied = 0;
    let kept = records
        .into_iter()
        .filter_map(|mut record| {
            let stripped = strip_urls(&record.message);
            if stripped != record.message {
                urls_removed += 1;
                record.message = stripped;
            }
            if record.message.trim().is_empty() {
                emptied += 1;
                None
            } else {
                Some(record)
            }
        })
        .collect();
    (kept, urls_removed, emptied)
}

#[derive(Serialize)]
struct ContributorEntry {
    page: String,
    posts: u64,
}

/// words.tsv, bigrams.tsv, quantiles.json and contributors.json for a corpus.
/// Returns the unigram table for the stopword stage.
pub fn write_stats_outputs(
    out: &mut OutputDir,
    records: &[PostRecord],
    top_n: usize,
) -> Result<FrequencyTable, CliError> {
    let unigrams = unigram_frequencies(records);
    let bigrams = bigram_frequencies(records);
    out.write_with("words.tsv", |w| unigrams.write_tsv(w))?;
    out.write_with("bigrams.tsv", |w| bigrams.write_tsv(w))?;
    let quantiles = wordcount_quantiles(records).map_err(|e| CliError::Degenerate {
        stage: "stats",
        message: e.to_string(),
    })?;
    out.write_json("quantiles.json", &quantiles)?;
    let contributors: Vec<ContributorEntry> = contributor_table(records, top_n)
        .into_iter()
        .map(|(page, posts)| ContributorEntry { page, posts })
        .collect();
    out.write_json("contributors.json", &contributors)?;
    eprintln!(
        "[stats] posts={} words={} unique_words={} unique_pairs={}",
        records.len(),
        unigrams.total_tokens(),
        unigrams.unique_words(),
        bigrams.unique_pairs()
    );
    Ok(unigrams)
}

/// stopwords.txt and stopword_report.json from a frequency table.
pub fn write_stopword_outputs(
    out: &mut OutputDir,
    table: &FrequencyTable,
    min_freq: u64,
    threshold_z: f64,
) -> Result<StopwordReport, CliError> {
    let report = derive_stopwords(table, min_freq, threshold_z).map_err(|e| CliError::Degenerate {
        stage: "stopwords",
        message: e.to_string(),
    })?;
    out.write_with("stopwords.txt", |w| export_stopwords(&report, w))?;
    out.write_json("stopword_report.json", &report)?;
    eprintln!(
        "[stopwords] vocab={} mu={:.3} sigma={:.3} selected={}",
        report.moments.vocab_size,
        report.moments.mu,
        report.moments.sigma,
        report.selected.len()
    );
    Ok(report)
}

pub fn write_codemix(out: &mut OutputDir, records: &[PostRecord]) -> Result<Option<CodemixStats>, CliError> {
    match codemix_stats(records) {
        Ok(stats) => {
            out.write_json("codemix.json", &stats)?;
            Ok(Some(stats))
        }
        Err(_) => Ok(None),
    }
}

#[derive(Serialize)]
struct WordTotals {
    words_with_urls: u64,
    words_without_urls: u64,
}

#[derive(Serialize)]
struct UrlStageDetail {
    posts_with_urls_stripped: u64,
    posts_emptied: u64,
}

/// The multilingual preset: ingest, drop empty messages, optionally strip
/// URLs, tag languages, and emit the corpus with summary statistics.
pub fn run_alpha(config: &PipelineConfig) -> Result<(), CliError> {
    config.validate()?;
    let mut out = OutputDir::create(&config.output_dir)?;
    let mut manifest = RunManifest::new("alpha", config.clone());

    let (records, parse_report) = read_input(&config.input, config.format)?;
    manifest.record_stage(
        "parse",
        parse_report.records_read,
        parse_report.records_kept,
        Some(&parse_report),
    );

    let before = records.len() as u64;
    let (records, drop_report) = drop_empty_messages(records);
    manifest.record_stage("drop_empty", before, records.len() as u64, Some(&drop_report));
    out.write_with("records.jsonl", |w| write_jsonl(&records, w))?;
    eprintln!("[ingest] read={} kept={}", parse_report.records_read, records.len());

    let words_with_urls = total_word_count(&records);
    let (records, words_without_urls) = if config.keep_urls {
        let stripped: Vec<PostRecord> = records
            .iter()
            .map(|r| PostRecord {
                message: strip_urls(&r.message),
                ..r.clone()
            })
            .collect();
        let total = total_word_count(&stripped);
        (records, total)
    } else {
        let before = records.len() as u64;
        let (records, urls_removed, emptied) = strip_urls_records(records);
        manifest.record_stage(
            "strip_urls",
            before,
            records.len() as u64,
            Some(&UrlStageDetail {
                posts_with_urls_stripped: urls_removed,
                posts_emptied: emptied,
            }),
        );
        let total = total_word_count(&records);
        (records, total)
    };
    out.write_json(
        "word_totals.json",
        &WordTotals {
            words_with_urls,
            words_without_urls,
        },
    )?;
    eprintln!("[words] with_urls={words_with_urls} without_urls={words_without_urls}");

    let before = records.len() as u64;
    let records = tag_records(records);
    manifest.record_stage::<()>("tag", before, records.len() as u64, None);
    write_codemix(&mut out, &records)?;

    out.write_with("corpus.jsonl", |w| write_jsonl(&records, w))?;
    let quantiles = wordcount_quantiles(&records).map_err(|e| CliError::Degenerate {
        stage: "stats",
        message: e.to_string(),
    })?;
    out.write_json("quantiles.json", &quantiles)?;
    let contributors: Vec<ContributorEntry> = contributor_table(&records, config.top_n)
        .into_iter()
        .map(|(page, posts)| ContributorEntry { page, posts })
        .collect();
    out.write_json("contributors.json", &contributors)?;

    out.write_manifest(&mut manifest)?;
    eprintln!("[done] alpha corpus: {} posts -> {}", records.len(), out.path().display());
    Ok(())
}

/// The Sinhala-only preset: ingest, tag, filter to the target language,
/// drop blacklisted pages, clean every message, then emit the corpus with
/// frequency tables and the derived stopword list.
pub fn run_redux(config: &PipelineConfig) -> Result<(), CliError> {
    config.validate()?;
    let language = config.language_filter.clone().ok_or_else(|| {
        CliError::Config("pipeline redux requires a language_filter (default si)".to_string())
    })?;
    let mut out = OutputDir::create(&config.output_dir)?;
    let mut manifest = RunManifest::new("redux", config.clone());

    let (records, parse_report) = read_input(&config.input, config.format)?;
    manifest.record_stage(
        "parse",
        parse_report.records_read,
        parse_report.records_kept,
        Some(&parse_report),
    );

    let before = records.len() as u64;
    let (records, drop_report) = drop_empty_messages(records);
    manifest.record_stage("drop_empty", before, records.len() as u64, Some(&drop_report));
    out.write_with("records.jsonl", |w| write_jsonl(&records, w))?;
    eprintln!("[ingest] read={} kept={}", parse_report.records_read, records.len());

    let before = records.len() as u64;
    let records = tag_records(records);
    manifest.record_stage::<()>("tag", before, records.len() as u64, None);
    out.write_with("tagged.jsonl", |w| write_jsonl(&records, w))?;
    let codemix = write_codemix(&mut out, &records)?;
    if let Some(stats) = codemix {
        eprintln!(
            "[codemix] sinhala_tagged={} also_english={} also_latinate={} ratio={:.3}",
            stats.sinhala_tagged, stats.also_english, stats.also_latinate, stats.latinate_ratio
        );
    }

    let before = records.len() as u64;
    let records = filter_language(records, &language);
    manifest.record_stage::<()>("language_filter", before, records.len() as u64, None);
    eprintln!("[filter] language={} kept={}", language, records.len());

    let before = records.len() as u64;
    let (records, blacklist_report) = filter_pages(records, &config.blacklist_pages);
    manifest.record_stage(
        "filter_pages",
        before,
        records.len() as u64,
        Some(&blacklist_report),
    );

    let before = records.len() as u64;
    let (records, cleaning_report) = clean_records(records, &config.cleaning, config.workers)?;
    manifest.record_stage("clean", before, records.len() as u64, Some(&cleaning_report));
    out.write_json("cleaning_report.json", &cleaning_report)?;
    out.write_with("corpus.jsonl", |w| write_jsonl(&records, w))?;
    eprintln!("[clean] kept={} emptied={}", records.len(), cleaning_report.posts_emptied);

    let unigrams = write_stats_outputs(&mut out, &records, config.top_n)?;
    write_stopword_outputs(&mut out, &unigrams, config.min_freq, config.threshold_z)?;

    out.write_manifest(&mut manifest)?;
    eprintln!("[done] redux corpus: {} posts -> {}", records.len(), out.path().display());
    Ok(())
}

/// Write a stage report as pretty JSON to a plain file (used by the
/// standalone subcommands, which do not produce a manifest).
pub fn write_report_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let context = format!("writing {}", path.display());
    let mut file = File::create(path).map_err(CliError::io(context.clone()))?;
    serde_json::to_writer_pretty(&mut file, value)
        .map_err(std::io::Error::other)
        .and_then(|()| file.write_all(b"\n"))
        .map_err(CliError::io(context))
}
