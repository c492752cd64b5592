//! Run manifests: enough provenance to re-run a command and verify outputs.
//!
//! A manifest records the command, topic, seed, parameter knobs, and SHA-256
//! digests of every input and output file. It deliberately carries no
//! timestamps or host information so identical runs write identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use std::fmt::Write as _;

    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(digest.len() * 2);
    for byte in digest {
        write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
    }
    hex
}

/// Hex SHA-256 of a file's contents.
pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub topic: String,
    pub seed: u64,
    /// Digest of the configuration file driving the run.
    pub config_digest: String,
    /// Extra parameters that shaped the run, stringified.
    pub parameters: BTreeMap<String, String>,
    /// Input file name → digest.
    pub inputs: BTreeMap<String, String>,
    /// Output file name → digest.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, topic: &str, seed: u64, config_digest: String) -> Self {
        RunManifest {
            command: command.to_string(),
            topic: topic.to_string(),
            seed,
            config_digest,
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Record an input file under its path as written by the user.
    pub fn input(&mut self, path: impl AsRef<Path>) -> Result<&mut Self> {
        let path = path.as_ref();
        self.inputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(self)
    }

    /// Record an output file under its base name.
    pub fn output(&mut self, path: impl AsRef<Path>) -> Result<&mut Self> {
        let path = path.as_ref();
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.outputs.insert(name, sha256_file(path)?);
        Ok(self)
    }

    /// Serialize as stable, human-readable JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail") + "\n"
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}
