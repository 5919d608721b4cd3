//! Atomic artifact writing and the output manifest.
//!
//! Artifacts are written to a temporary file in the output directory and
//! renamed into place. `manifest.json` lists every artifact with its
//! content hash and the configuration that produced it; reruns with the
//! same inputs and configuration reproduce identical hashes.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
    /// Subcommand that produced the artifact.
    pub command: String,
    /// Resolved configuration echo of that run.
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: String,
    pub artifacts: Vec<ArtifactEntry>,
}

/// Collects artifacts of one subcommand run and maintains `manifest.json`.
pub struct ArtifactWriter {
    dir: PathBuf,
    command: String,
    config_echo: serde_json::Value,
    written: Vec<ArtifactEntry>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, command: &str, config: &impl Serialize) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config_echo: serde_json::to_value(config)?,
            written: Vec::new(),
        })
    }

    /// Config echo as a compact JSON string, for CSV comment headers.
    pub fn config_line(&self) -> String {
        serde_json::to_string(&self.config_echo).expect("config serializes")
    }

    /// Write one artifact atomically from a rendering closure.
    pub fn write(
        &mut self,
        name: &str,
        render: impl FnOnce(&mut Vec<u8>) -> Result<()>,
    ) -> Result<PathBuf> {
        let mut bytes = Vec::new();
        render(&mut bytes)?;
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".tmp.{name}"));
        {
            let mut file = std::fs::File::create(&tmp)
                .with_context(|| format!("cannot create {}", tmp.display()))?;
            file.write_all(&bytes)?;
            file.flush()?;
        }
        std::fs::rename(&tmp, &path)
            .with_context(|| format!("cannot move artifact into place at {}", path.display()))?;
        self.written.push(ArtifactEntry {
            name: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(&bytes)),
            command: self.command.clone(),
            config: self.config_echo.clone(),
        });
        Ok(path)
    }

    /// Merge this run's artifacts into `manifest.json` (upsert by name).
    pub fn finalize(self) -> Result<Manifest> {
        let manifest_path = self.dir.join("manifest.json");
        let mut entries: BTreeMap<String, ArtifactEntry> = match std::fs::read(&manifest_path) {
            Ok(bytes) => serde_json::from_slice::<Manifest>(&bytes)
                .map(|m| {
                    m.artifacts
                        .into_iter()
                        .map(|a| (a.name.clone(), a))
                        .collect()
                })
                .unwrap_or_default(),
            Err(_) => BTreeMap::new(),
        };
        for artifact in self.written {
            entries.insert(artifact.name.clone(), artifact);
        }
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION.to_string(),
            artifacts: entries.into_values().collect(),
        };
        let rendered = serde_json::to_vec_pretty(&manifest)?;
        let tmp = self.dir.join(".tmp.manifest.json");
        std::fs::write(&tmp, &rendered)?;
        std::fs::rename(&tmp, &manifest_path)?;
        Ok(manifest)
    }
}

/// Standard CSV preamble: schema version and config echo as comments.
pub fn csv_preamble(out: &mut Vec<u8>, config_line: &str) -> Result<()> {
    writeln!(out, "# schema_version: {SCHEMA_VERSION}")?;
    writeln!(out, "# config: {config_line}")?;
    Ok(())
}
