//! `corpora`: build social-media text corpora and derive stopwords.
//!
//! Progress goes to stderr; data only ever goes to files, so runs are
//! shell-composable. Exit codes: 0 success, 2 configuration error, 3 input
//! parse error, 4 empty-result degenerate case.

mod config;
mod error;
mod manifest;
mod pipeline;

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use corpora_core::cleaning::{parse_artifact_list, CleaningConfig};
use corpora_core::ingest::{drop_empty_messages, filter_pages, write_jsonl, InputFormat};
use corpora_core::stats::FrequencyTable;

use config::{default_redux_blacklist, resolve_format, ConfigFile, PipelineConfig};
use error::CliError;
use manifest::OutputDir;

#[derive(Parser)]
#[command(name = "corpora", version, about = "Corpus construction and stopword derivation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a post dump, drop empty messages, and re-serialize as JSONL.
    Ingest(IngestArgs),
    /// Attach language predictions and codemix statistics.
    Tag(TagArgs),
    /// Filter blacklisted pages and clean every message.
    Clean(CleanArgs),
    /// Frequency tables, quantiles, and contributor table for a corpus.
    Stats(StatsArgs),
    /// Derive a stopword list from a word-frequency TSV.
    Stopwords(StopwordsArgs),
    /// Run a full preset end to end, with a manifest.
    #[command(subcommand)]
    Pipeline(PipelineCommand),
}

#[derive(Subcommand)]
enum PipelineCommand {
    /// Multilingual corpus: ingest, strip URLs, tag languages.
    Alpha(PipelineArgs),
    /// Sinhala-only corpus: tag, filter, clean, count, derive stopwords.
    Redux(PipelineArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    /// csv or jsonl; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<InputFormat>,
    #[arg(long)]
    out: PathBuf,
    /// Page name to drop (repeatable).
    #[arg(long = "blacklist-page")]
    blacklist_pages: Vec<String>,
}

#[derive(Args)]
struct TagArgs {
    /// JSONL records, e.g. the output of `corpora ingest`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Keep only posts whose prediction includes this language code.
    #[arg(long = "language-filter")]
    language_filter: Option<String>,
}

#[derive(Args)]
struct CleanArgs {
    /// JSONL records, e.g. the output of `corpora tag`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Cleaning config as TOML (defaults to the redux cleaning rules).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra artifact token (repeatable).
    #[arg(long = "artifact-token")]
    artifact_tokens: Vec<String>,
    /// Artifact token list file, one token per line.
    #[arg(long = "artifact-list")]
    artifact_list: Option<PathBuf>,
    /// Page name to drop before cleaning (repeatable).
    #[arg(long = "blacklist-page")]
    blacklist_pages: Vec<String>,
    /// Strip URLs only; leave punctuation and scripts untouched.
    #[arg(long = "urls-only")]
    urls_only: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct StatsArgs {
    /// JSONL records, e.g. the output of `corpora clean`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "top-n", default_value_t = 10)]
    top_n: usize,
}

#[derive(Args)]
struct StopwordsArgs {
    /// Word-frequency TSV, e.g. words.tsv from `corpora stats`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "threshold-z", default_value_t = 1.5)]
    threshold_z: f64,
    #[arg(long = "min-freq", default_value_t = 2)]
    min_freq: u64,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<InputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pipeline config as TOML; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "blacklist-page")]
    blacklist_pages: Vec<String>,
    #[arg(long = "artifact-token")]
    artifact_tokens: Vec<String>,
    #[arg(long = "artifact-list")]
    artifact_list: Option<PathBuf>,
    #[arg(long = "language-filter")]
    language_filter: Option<String>,
    #[arg(long = "threshold-z")]
    threshold_z: Option<f64>,
    #[arg(long = "min-freq")]
    min_freq: Option<u64>,
    #[arg(long = "top-n")]
    top_n: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Keep URLs in the emitted corpus (word totals are reported both ways).
    #[arg(long = "keep-urls")]
    keep_urls: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest(args) => run_ingest(args),
        Command::Tag(args) => run_tag(args),
        Command::Clean(args) => run_clean(args),
        Command::Stats(args) => run_stats(args),
        Command::Stopwords(args) => run_stopwords(args),
        Command::Pipeline(PipelineCommand::Alpha(args)) => {
            pipeline::run_alpha(&build_pipeline_config(args, false)?)
        }
        Command::Pipeline(PipelineCommand::Redux(args)) => {
            pipeline::run_redux(&build_pipeline_config(args, true)?)
        }
    }
}

fn run_ingest(args: IngestArgs) -> Result<(), CliError> {
    let format = resolve_format(args.format, None, &args.input)?;
    let mut out = OutputDir::create(&args.out)?;
    let (records, parse_report) = pipeline::read_input(&args.input, format)?;
    let (records, drop_report) = drop_empty_messages(records);
    let blacklist: BTreeSet<String> = args.blacklist_pages.into_iter().collect();
    let (records, blacklist_report) = filter_pages(records, &blacklist);
    out.write_with("records.jsonl", |w| write_jsonl(&records, w))?;
    #[derive(serde::Serialize)]
    struct Report<'a> {
        parse: &'a corpora_core::ingest::IngestReport,
        drop_empty: &'a corpora_core::ingest::IngestReport,
        filter_pages: &'a corpora_core::ingest::IngestReport,
    }
    pipeline::write_report_json(
        &args.out.join("ingest_report.json"),
        &Report {
            parse: &parse_report,
            drop_empty: &drop_report,
            filter_pages: &blacklist_report,
        },
    )?;
    eprintln!(
        "[ingest] read={} kept={} pages={}",
        parse_report.records_read, blacklist_report.records_kept, blacklist_report.distinct_pages
    );
    Ok(())
}

fn run_tag(args: TagArgs) -> Result<(), CliError> {
    let mut out = OutputDir::create(&args.out)?;
    let records = pipeline::read_jsonl_records(&args.input)?;
    let records = pipeline::tag_records(records);
    pipeline::write_codemix(&mut out, &records)?;
    let records = match &args.language_filter {
        Some(code) => pipeline::filter_language(records, code),
        None => records,
    };
    out.write_with("tagged.jsonl", |w| write_jsonl(&records, w))?;
    eprintln!("[tag] kept={}", records.len());
    Ok(())
}

fn run_clean(args: CleanArgs) -> Result<(), CliError> {
    let mut cleaning = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(CliError::io(format!("reading config {}", path.display())))?;
            toml::from_str::<CleaningConfig>(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?
        }
        None => CleaningConfig::redux(),
    };
    apply_artifact_flags(&mut cleaning, &args.artifact_tokens, args.artifact_list.as_deref())?;

    let mut out = OutputDir::create(&args.out)?;
    let records = pipeline::read_jsonl_records(&args.input)?;
    let blacklist: BTreeSet<String> = args.blacklist_pages.into_iter().collect();
    let (records, blacklist_report) = filter_pages(records, &blacklist);

    if args.urls_only {
        let (records, stripped, emptied) = pipeline::strip_urls_records(records);
        out.write_with("cleaned.jsonl", |w| write_jsonl(&records, w))?;
        eprintln!("[clean] urls-only kept={} stripped={stripped} emptied={emptied}", records.len());
        return Ok(());
    }

    let (records, report) = pipeline::clean_records(records, &cleaning, args.workers)?;
    out.write_with("cleaned.jsonl", |w| write_jsonl(&records, w))?;
    #[derive(serde::Serialize)]
    struct Report<'a> {
        filter_pages: &'a corpora_core::ingest::IngestReport,
        cleaning: &'a corpora_core::cleaning::CleaningReport,
    }
    pipeline::write_report_json(
        &args.out.join("cleaning_report.json"),
        &Report {
            filter_pages: &blacklist_report,
            cleaning: &report,
        },
    )?;
    eprintln!("[clean] kept={} emptied={}", records.len(), report.posts_emptied);
    Ok(())
}

fn run_stats(args: StatsArgs) -> Result<(), CliError> {
    let mut out = OutputDir::create(&args.out)?;
    let records = pipeline::read_jsonl_records(&args.input)?;
    pipeline::write_stats_outputs(&mut out, &records, args.top_n)?;
    Ok(())
}

fn run_stopwords(args: StopwordsArgs) -> Result<(), CliError> {
    if !args.threshold_z.is_finite() || args.threshold_z <= 0.0 {
        return Err(CliError::Config(format!(
            "threshold-z must be > 0, got {}",
            args.threshold_z
        )));
    }
    if args.min_freq < 1 {
        return Err(CliError::Config("min-freq must be >= 1".to_string()));
    }
    let mut out = OutputDir::create(&args.out)?;
    let file = fs::File::open(&args.input)
        .map_err(CliError::io(format!("opening {}", args.input.display())))?;
    let table = FrequencyTable::read_tsv(std::io::BufReader::new(file))
        .map_err(CliError::io(format!("reading {}", args.input.display())))?;
    pipeline::write_stopword_outputs(&mut out, &table, args.min_freq, args.threshold_z)?;
    Ok(())
}

fn apply_artifact_flags(
    cleaning: &mut CleaningConfig,
    tokens: &[String],
    list: Option<&std::path::Path>,
) -> Result<(), CliError> {
    for token in tokens {
        cleaning.artifact_tokens.insert(token.clone());
    }
    if let Some(path) = list {
        let text = fs::read_to_string(path)
            .map_err(CliError::io(format!("reading artifact list {}", path.display())))?;
        let (extra_tokens, extra_sequences) = parse_artifact_list(&text);
        cleaning.artifact_tokens.extend(extra_tokens);
        cleaning.artifact_sequences.extend(extra_sequences);
    }
    cleaning.normalize();
    Ok(())
}

fn build_pipeline_config(args: PipelineArgs, redux: bool) -> Result<PipelineConfig, CliError> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let input = args
        .input
        .or(file.input)
        .ok_or_else(|| CliError::Config("missing --input".to_string()))?;
    let output_dir = args
        .out
        .or(file.output_dir)
        .ok_or_else(|| CliError::Config("missing --out".to_string()))?;
    let format = resolve_format(args.format, file.format, &input)?;

    let mut cleaning = file.cleaning.unwrap_or_default();
    apply_artifact_flags(&mut cleaning, &args.artifact_tokens, args.artifact_list.as_deref())?;

    let mut blacklist_pages = file.blacklist_pages.unwrap_or_else(|| {
        if redux {
            default_redux_blacklist()
        } else {
            BTreeSet::new()
        }
    });
    blacklist_pages.extend(args.blacklist_pages);

    let language_filter = args
        .language_filter
        .or(file.language_filter)
        .or_else(|| redux.then(|| "si".to_string()));

    let config = PipelineConfig {
        input,
        format,
        output_dir,
        cleaning,
        blacklist_pages,
        language_filter,
        threshold_z: args.threshold_z.or(file.threshold_z).unwrap_or(1.5),
        min_freq: args.min_freq.or(file.min_freq).unwrap_or(2),
        top_n: args.top_n.or(file.top_n).unwrap_or(10),
        workers: args.workers.or(file.workers).unwrap_or(1),
        keep_urls: args.keep_urls || file.keep_urls.unwrap_or(false),
    };
    config.validate()?;
    Ok(config)
}
