//! Run manifests: one `manifest.json` per output directory.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

#[derive(Serialize, Debug)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: Option<u64>,
    /// SHA-256 of every input file, keyed by the path as given.
    pub input_hashes: BTreeMap<String, String>,
    pub tool_version: String,
    pub wall_time_ms: u128,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects manifest fields while a command runs.
pub struct Recorder {
    command: String,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    start: Instant,
}

impl Recorder {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            seed: None,
            inputs: BTreeMap::new(),
            start: Instant::now(),
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(path.display().to_string(), sha256_hex(bytes));
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            command: self.command,
            arguments: std::env::args().skip(1).collect(),
            seed: self.seed,
            input_hashes: self.inputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: self.start.elapsed().as_millis(),
        }
    }

    pub fn write(self, dir: &Path) -> std::io::Result<()> {
        let m = self.finish();
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n";
        std::fs::write(dir.join("manifest.json"), text)
    }
}
