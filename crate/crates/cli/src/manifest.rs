//! Run manifest: per-stage record counts and SHA-256 digests of every output
//! file, the determinism witness for a pipeline run.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct StageReport {
    pub name: String,
    pub posts_in: u64,
    pub posts_out: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub preset: String,
    pub config: PipelineConfig,
    pub stages: Vec<StageReport>,
    pub digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(preset: &str, config: PipelineConfig) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            preset: preset.to_string(),
            config,
            stages: Vec::new(),
            digests: BTreeMap::new(),
        }
    }

    pub fn record_stage<T: Serialize>(
        &mut self,
        name: &str,
        posts_in: u64,
        posts_out: u64,
        detail: Option<&T>,
    ) {
        let detail = detail.map(|d| serde_json::to_value(d).expect("report serializes"));
        self.stages.push(StageReport {
            name: name.to_string(),
            posts_in,
            posts_out,
            detail,
        });
    }
}

struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Output directory handle that records a digest for every file written.
pub struct OutputDir {
    dir: PathBuf,
    digests: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<OutputDir, CliError> {
        fs::create_dir_all(dir)
            .map_err(CliError::io(format!("creating output directory {}", dir.display())))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            digests: BTreeMap::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write_with<F>(&mut self, name: &str, fill: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> io::Result<()>,
    {
        let path = self.dir.join(name);
        let context = format!("writing {}", path.display());
        let file = File::create(&path).map_err(CliError::io(context.clone()))?;
        let mut writer = HashingWriter {
            inner: BufWriter::new(file),
            hasher: Sha256::new(),
        };
        fill(&mut writer).map_err(CliError::io(context.clone()))?;
        writer.flush().map_err(CliError::io(context))?;
        self.digests
            .insert(name.to_string(), hex::encode(writer.hasher.finalize()));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")
        })
    }

    /// Write the manifest itself (not part of its own digest map).
    pub fn write_manifest(&mut self, manifest: &mut RunManifest) -> Result<(), CliError> {
        manifest.digests = self.digests.clone();
        let path = self.dir.join("manifest.json");
        let context = format!("writing {}", path.display());
        let file = File::create(&path).map_err(CliError::io(context.clone()))?;
        let mut writer = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut writer, manifest)
            .map_err(io::Error::other)
            .and_then(|()| writer.write_all(b"\n"))
            .and_then(|()| writer.flush())
            .map_err(CliError::io(context))
    }
}
