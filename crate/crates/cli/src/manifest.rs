//! Run manifests: everything needed to replay a run and byte-reproduce its
//! numeric outputs — the resolved parameter set, input file hashes, worker
//! count, and the produced artifacts.
//!
//! The manifest itself carries wall-clock fields and is not byte-stable;
//! the outputs it points to are.

use std::path::{Path, PathBuf};
use std::time::SystemTime;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::Command;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputHash {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// The full resolved parameter set; replay dispatches on this directly.
    pub command: Command,
    pub inputs: Vec<InputHash>,
    pub outputs: Vec<PathBuf>,
    pub workers: usize,
    pub unix_time: u64,
    pub elapsed_seconds: f64,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    Ok(out)
}

impl RunManifest {
    pub fn new(command: Command, workers: usize) -> RunManifest {
        RunManifest {
            tool: "lorentz".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            inputs: Vec::new(),
            outputs: Vec::new(),
            workers,
            unix_time: SystemTime::now()
                .duration_since(SystemTime::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            elapsed_seconds: 0.0,
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputHash {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}
