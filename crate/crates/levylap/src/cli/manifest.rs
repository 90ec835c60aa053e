//! Run manifests: everything needed to reproduce a run, plus content
//! digests of what it produced.

use crate::cli::config::ConfigMap;
use crate::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FileDigest {
    pub file: String,
    pub sha256: String,
}

/// One run: the command, the fully resolved configuration, seed, code
/// version, wall-clock bounds, and the named outputs with their digests.
/// Re-running `command` with the echoed config reproduces the CSV outputs
/// byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<FileDigest>,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_of_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

impl RunManifest {
    pub fn begin(command: &str, cfg: &ConfigMap, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            config: cfg.echo().into_iter().collect(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: unix_now(),
            finished_unix: 0,
            outputs: Vec::new(),
        }
    }

    /// Digests the named files (paths relative to `dir`) and writes
    /// `manifest.json` into `dir`.
    pub fn finish(mut self, dir: &Path, files: &[&str]) -> Result<Self> {
        for name in files {
            self.outputs.push(FileDigest {
                file: name.to_string(),
                sha256: sha256_of_file(&dir.join(name))?,
            });
        }
        self.finished_unix = unix_now();
        let json = serde_json::to_string_pretty(&self)?;
        std::fs::write(dir.join("manifest.json"), json)?;
        Ok(self)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "x\n1\n").unwrap();
        let mut cfg = ConfigMap::new();
        cfg.set("measure", "point_mass");
        cfg.set("lambda", "2");
        let m = RunManifest::begin("solve-rde", &cfg, 7)
            .finish(dir.path(), &["a.csv"])
            .unwrap();
        // sha256 of the bytes "x\n1\n", fixed forever
        assert_eq!(
            m.outputs[0].sha256,
            "daff832f802000e645771a60983c76c963f6ee602a6230e45237bd360e91cc1a"
        );
        let back = RunManifest::load(dir.path()).unwrap();
        assert_eq!(back.command, "solve-rde");
        assert_eq!(back.seed, 7);
        assert_eq!(back.config.get("lambda").map(|s| s.as_str()), Some("2"));
        assert_eq!(back.outputs, m.outputs);
        assert!(back.finished_unix >= back.started_unix);
    }

    #[test]
    fn identical_content_identical_digest() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "same bytes").unwrap();
        std::fs::write(dir.path().join("b.csv"), "same bytes").unwrap();
        let da = sha256_of_file(&dir.path().join("a.csv")).unwrap();
        let db = sha256_of_file(&dir.path().join("b.csv")).unwrap();
        assert_eq!(da, db);
        assert_eq!(da.len(), 64);
        std::fs::write(dir.path().join("c.csv"), "same bytes!").unwrap();
        assert_ne!(da, sha256_of_file(&dir.path().join("c.csv")).unwrap());
    }
}
