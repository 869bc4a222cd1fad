use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::harness::ExperimentConfig;
use crate::scalar::Scalar;

use super::config::write_config;

pub const MANIFEST_FILE: &str = "manifest.toml";

/// Record of one run: resolved config, seed, tool version and a SHA-256
/// digest per output file. Loading it with the config parser reproduces the
/// run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub master_seed: u64,
    pub config: String,
    /// `(file name, hex digest)` in write order.
    pub outputs: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new<T: Scalar>(command: &str, cfg: &ExperimentConfig<T>) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: cfg.master_seed,
            config: write_config(cfg),
            outputs: Vec::new(),
        }
    }

    /// Manifest for runs without an experiment config (e.g. the solver).
    pub fn bare(command: &str, master_seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            config: String::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, name: &str, contents: &[u8]) {
        self.outputs.push((name.to_string(), sha256_hex(contents)));
    }

    pub fn render(&self) -> String {
        let mut s = self.config.clone();
        if !s.is_empty() {
            s.push('\n');
        }
        writeln!(s, "[manifest]").unwrap();
        writeln!(s, "command = \"{}\"", self.command).unwrap();
        writeln!(s, "version = \"{}\"", self.version).unwrap();
        writeln!(s, "master_seed = {}", self.master_seed).unwrap();
        writeln!(s, "\n[manifest.outputs]").unwrap();
        for (name, digest) in &self.outputs {
            writeln!(s, "\"{name}\" = \"{digest}\"").unwrap();
        }
        s
    }
}

/// Writes output files into one directory and keeps the manifest in step.
pub struct OutputDir {
    dir: PathBuf,
    manifest: RunManifest,
}

impl OutputDir {
    pub fn create(dir: &Path, manifest: RunManifest) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf(), manifest })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.manifest.record(name, contents.as_bytes());
        Ok(())
    }

    /// Writes the manifest; call once after every output.
    pub fn finish(self) -> std::io::Result<RunManifest> {
        std::fs::write(self.dir.join(MANIFEST_FILE), self.manifest.render())?;
        Ok(self.manifest)
    }
}
