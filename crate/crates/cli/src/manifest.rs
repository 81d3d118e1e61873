//! Output directory bookkeeping and the per-run manifest.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use travwave::model::ModelConfig;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::json;
use crate::svg::Plot;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the effective configuration in compact JSON.
    pub config_hash: String,
    pub model: ModelConfig,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub threads: usize,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Collects the files written by one command.
pub struct Run {
    dir: PathBuf,
    command: String,
    config: RunConfig,
    svg: bool,
    start: Instant,
    outputs: Vec<String>,
    tolerances: BTreeMap<String, f64>,
}

impl Run {
    pub fn new(dir: &Path, command: String, config: RunConfig, svg: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        let mut tolerances = BTreeMap::new();
        tolerances.insert("eps_rel".into(), config.solver.eps_rel);
        tolerances.insert("width_rel".into(), config.solver.width_rel);
        let ode = travwave::ode::OdeOptions::default();
        tolerances.insert("ode_rtol".into(), ode.rtol);
        tolerances.insert("ode_atol".into(), ode.atol);
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            config,
            svg,
            start: Instant::now(),
            outputs: Vec::new(),
            tolerances,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.into(), value);
    }

    /// Writes `name` through `body` and records it.
    pub fn file<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        let mut w = BufWriter::new(f);
        body(&mut w).and_then(|_| w.flush())?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = json::to_string(value).map_err(|e| CliError::Io(e.to_string()))?;
        self.file(name, |w| w.write_all(text.as_bytes()))
    }

    /// Writes the plot only when SVG output was requested.
    pub fn svg(&mut self, name: &str, plot: impl FnOnce() -> Plot) -> Result<(), CliError> {
        if !self.svg {
            return Ok(());
        }
        let text = plot().render();
        self.file(name, |w| w.write_all(text.as_bytes()))
    }

    pub fn finish(self) -> Result<RunManifest, CliError> {
        let m = RunManifest {
            command: self.command,
            config_hash: config_hash(&self.config),
            model: self.config.model,
            outputs: self.outputs,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            tolerances: self.tolerances,
            threads: rayon::current_num_threads(),
        };
        let text = json::to_string(&m).map_err(|e| CliError::Io(e.to_string()))?;
        let path = self.dir.join(MANIFEST_FILE);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(m)
    }
}
