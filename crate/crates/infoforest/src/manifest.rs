//! Run manifests: one JSON document per CLI invocation recording what was
//! run, with which resolved settings and inputs, and what came out.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Hex SHA-256 of a file's bytes.
pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    /// SHA-256 of every input file, keyed by role.
    pub inputs: Map<String, Value>,
    pub metrics: Map<String, Value>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            tool_version: env!("CARGO_PKG_VERSION"),
            config: Value::Null,
            seed: None,
            inputs: Map::new(),
            metrics: Map::new(),
            duration_seconds: 0.0,
        }
    }

    pub fn config<T: Serialize>(&mut self, config: &T) -> &mut Self {
        self.config = serde_json::to_value(config).expect("config serializes");
        self
    }

    pub fn input(&mut self, role: &str, bytes: &[u8]) -> &mut Self {
        self.inputs
            .insert(role.to_owned(), Value::String(fingerprint(bytes)));
        self
    }

    pub fn metric<T: Serialize>(&mut self, name: &str, value: T) -> &mut Self {
        self.metrics.insert(
            name.to_owned(),
            serde_json::to_value(value).expect("metric serializes"),
        );
        self
    }

    pub fn finish(&mut self, elapsed: Duration) -> &mut Self {
        self.duration_seconds = elapsed.as_secs_f64();
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// `<out>.manifest.json` next to an output file.
pub fn default_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}
