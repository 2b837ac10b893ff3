//! Reproducibility manifest: SHA-256 digests of stage inputs and outputs,
//! per-stage derived seeds, and the tool version.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// SHA-256 of a file's contents, hex-encoded.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut file =
        File::open(path).with_context(|| format!("cannot digest {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FileEntry {
    pub path: PathBuf,
    pub sha256: String,
}

/// What one stage consumed and produced.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct StageFragment {
    pub stage: String,
    pub seed: u64,
    pub inputs: Vec<FileEntry>,
    pub outputs: Vec<FileEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct Manifest {
    pub version: String,
    pub root_seed: u64,
    pub stages: Vec<StageFragment>,
}

impl Manifest {
    pub fn new(root_seed: u64) -> Self {
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            root_seed,
            stages: Vec::new(),
        }
    }

    /// Record a completed stage; replaces an earlier fragment with the same
    /// stage name so re-runs stay idempotent.
    pub fn record(
        &mut self,
        stage: &str,
        seed: u64,
        inputs: &[PathBuf],
        outputs: &[PathBuf],
    ) -> Result<()> {
        let digest_all = |paths: &[PathBuf]| -> Result<Vec<FileEntry>> {
            paths
                .iter()
                .map(|p| {
                    Ok(FileEntry {
                        path: p.clone(),
                        sha256: file_digest(p)?,
                    })
                })
                .collect()
        };
        let fragment = StageFragment {
            stage: stage.to_string(),
            seed,
            inputs: digest_all(inputs)?,
            outputs: digest_all(outputs)?,
        };
        self.stages.retain(|s| s.stage != stage);
        self.stages.push(fragment);
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
