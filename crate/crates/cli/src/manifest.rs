//! Run manifests: enough to repeat a run and compare its outputs.

use std::path::Path;
use std::time::Duration;

use coxeter_proper::Error;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub group: Option<String>,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub library_version: String,
    pub rng: Option<String>,
    /// `(file, sha256)` for each layer file written.
    pub layer_checksums: Vec<(String, String)>,
    pub wall_seconds: f64,
    pub status: String,
    pub outputs: serde_json::Value,
}

impl RunManifest {
    pub fn new(threads: usize) -> Self {
        Self {
            command_line: std::env::args().collect(),
            group: None,
            seeds: Vec::new(),
            threads,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            rng: None,
            layer_checksums: Vec::new(),
            wall_seconds: 0.0,
            status: String::new(),
            outputs: serde_json::Value::Null,
        }
    }

    pub fn finish(&mut self, elapsed: Duration, error: Option<&Error>) {
        self.wall_seconds = elapsed.as_secs_f64();
        self.status = match error {
            None => "ok".to_string(),
            Some(e) => format!("error: {e}"),
        };
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(path, text + "\n")
    }
}
