//! Run manifests recording what produced each output file.

use serde::Serialize;
use std::path::Path;
use std::time::Instant;

/// Everything needed to reproduce a run: the command, its full parameter
/// set, and the seed. Wall-clock time and output names are bookkeeping;
/// outputs depend only on command, parameters, and seed.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub library_version: &'static str,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &'static str, parameters: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            command,
            parameters,
            seed,
            library_version: env!("CARGO_PKG_VERSION"),
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    /// Stamps the elapsed time and writes manifest.json next to the outputs.
    pub fn write(mut self, dir: &Path, started: Instant) -> std::io::Result<()> {
        self.wall_clock_seconds = started.elapsed().as_secs_f64();
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), text + "\n")
    }
}
