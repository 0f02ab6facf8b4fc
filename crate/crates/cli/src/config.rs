//! Pipeline configuration: defaults, TOML config files, and flag overrides.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use corpora_core::cleaning::CleaningConfig;
use corpora_core::ingest::InputFormat;

use crate::error::CliError;

/// Everything a pipeline run needs. Environment variables are never
/// consulted; two runs with the same config and inputs produce byte-identical
/// outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub output_dir: PathBuf,
    pub cleaning: CleaningConfig,
    pub blacklist_pages: BTreeSet<String>,
    pub language_filter: Option<String>,
    pub threshold_z: f64,
    pub min_freq: u64,
    pub top_n: usize,
    pub workers: usize,
    pub keep_urls: bool,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.output_dir == self.input {
            return Err(CliError::Config(
                "output directory must be distinct from the input path".to_string(),
            ));
        }
        if !self.threshold_z.is_finite() || self.threshold_z <= 0.0 {
            return Err(CliError::Config(format!(
                "threshold_z must be > 0, got {}",
                self.threshold_z
            )));
        }
        if self.min_freq < 1 {
            return Err(CliError::Config("min_freq must be >= 1".to_string()));
        }
        if self.workers < 1 {
            return Err(CliError::Config("workers must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// The on-disk TOML form: every field optional, flags win over the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub format: Option<InputFormat>,
    pub output_dir: Option<PathBuf>,
    pub cleaning: Option<CleaningConfig>,
    pub blacklist_pages: Option<BTreeSet<String>>,
    pub language_filter: Option<String>,
    pub threshold_z: Option<f64>,
    pub min_freq: Option<u64>,
    pub top_n: Option<usize>,
    pub workers: Option<usize>,
    pub keep_urls: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = fs::read_to_string(path)
            .map_err(CliError::io(format!("reading config {}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }
}

/// Pages the redux preset drops by default: both contributed mostly URL
/// formatting quirks and engagement-bait boilerplate.
pub fn default_redux_blacklist() -> BTreeSet<String> {
    ["Rivira", "Sirasa Lakshapathi"]
        .into_iter()
        .map(String::from)
        .collect()
}

/// Guess the input format from the file extension when no flag or config
/// value settles it.
pub fn infer_format(path: &Path) -> Option<InputFormat> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "csv" => Some(InputFormat::Csv),
        "jsonl" | "ndjson" => Some(InputFormat::Jsonl),
        _ => None,
    }
}

pub fn resolve_format(
    flag: Option<InputFormat>,
    file: Option<InputFormat>,
    input: &Path,
) -> Result<InputFormat, CliError> {
    flag.or(file).or_else(|| infer_format(input)).ok_or_else(|| {
        CliError::Config(format!(
            "cannot determine input format of {} (pass --format csv|jsonl)",
            input.display()
        ))
    })
}
