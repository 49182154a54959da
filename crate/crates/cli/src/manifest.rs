use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

/// Machine the run executed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Platform {
    pub os: String,
    pub arch: String,
    pub family: String,
    pub available_parallelism: usize,
}

impl Platform {
    pub fn current() -> Self {
        Platform {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            family: std::env::consts::FAMILY.into(),
            available_parallelism: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

/// Completion marker for a command: written last, after every listed output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub platform: Platform,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<PathBuf>,
    pub master_seed: Option<u64>,
}

/// Tracks a command's outputs and writes the manifest once they are complete.
pub struct RunRecorder {
    command: String,
    dir: PathBuf,
    started: SystemTime,
    clock: Instant,
    outputs: Vec<PathBuf>,
}

impl RunRecorder {
    /// Creates the output directory and removes any stale manifest in it.
    pub fn start(command: &str, dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
        let stale = dir.join(MANIFEST_NAME);
        match std::fs::remove_file(&stale) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(CliError::output(stale, e)),
        }
        Ok(RunRecorder {
            command: command.into(),
            dir: dir.to_path_buf(),
            started: SystemTime::now(),
            clock: Instant::now(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Creates `name` in the output directory, fills it through `fill`, and records it.
    pub fn emit<F>(&mut self, name: &str, fill: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::result::Result<(), String>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::output(&path, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w).map_err(|m| CliError::output(&path, std::io::Error::other(m)))?;
        w.flush().map_err(|e| CliError::output(&path, e))?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    /// Records files written by someone else.
    pub fn record(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        self.outputs.extend(paths);
    }

    pub fn finish<C: Serialize>(self, config: &C, master_seed: Option<u64>) -> Result<RunManifest> {
        let config = serde_json::to_value(config).map_err(|e| CliError::output(&self.dir, e.into()))?;
        let manifest = RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            platform: Platform::current(),
            started_unix_seconds: self
                .started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            wall_clock_seconds: self.clock.elapsed().as_secs_f64(),
            outputs: self.outputs,
            master_seed,
        };
        let path = self.dir.join(MANIFEST_NAME);
        let file = File::create(&path).map_err(|e| CliError::output(&path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, &manifest).map_err(|e| CliError::output(&path, e.into()))?;
        w.flush().map_err(|e| CliError::output(&path, e))?;
        Ok(manifest)
    }
}
