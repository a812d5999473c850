//! Artifact writers. Every file embeds the resolved config; timestamps go
//! only to the sidecar log.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

pub struct Artifacts {
    dir: PathBuf,
    config: Value,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, config: &RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::validation(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config: serde_json::to_value(config).expect("config serializes"),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn create(&mut self, name: &str) -> Result<fs::File, CliError> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path)
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(file)
    }

    /// `summary` must serialize to a JSON object; the config is added under
    /// the key `config`.
    pub fn json(&mut self, name: &str, summary: &impl Serialize) -> Result<(), CliError> {
        let mut value = serde_json::to_value(summary).expect("summary serializes");
        let obj = value.as_object_mut().expect("summary is a JSON object");
        obj.insert("config".into(), self.config.clone());
        let mut file = self.create(name)?;
        let text = serde_json::to_string_pretty(&value).expect("serializable");
        writeln!(file, "{text}").map_err(io_err)
    }

    /// CSV with a leading `# config: {...}` comment line.
    pub fn csv<R, C>(&mut self, name: &str, header: &[&str], rows: R) -> Result<(), CliError>
    where
        R: IntoIterator<Item = Vec<C>>,
        C: Cell,
    {
        let config = serde_json::to_string(&self.config).expect("serializable");
        let mut out = std::io::BufWriter::new(self.create(name)?);
        writeln!(out, "# config: {config}").map_err(io_err)?;
        writeln!(out, "{}", header.join(",")).map_err(io_err)?;
        for row in rows {
            let line: Vec<String> = row.iter().map(Cell::cell).collect();
            writeln!(out, "{}", line.join(",")).map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }
}

/// CSV cell formatting. Floats use the shortest round-trip representation,
/// in exponent form outside `[1e-4, 1e15)`.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        let a = self.abs();
        if *self == 0.0 || (1e-4..1e15).contains(&a) || !self.is_finite() {
            format!("{}", self + 0.0)
        } else {
            format!("{self:e}")
        }
    }
}

impl Cell for String {
    fn cell(&self) -> String {
        self.clone()
    }
}

pub fn num(x: f64) -> String {
    x.cell()
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::validation(format!("write failed: {e}"))
}

/// Appends one line per run to `run.log` in `dir`.
pub fn sidecar_log(dir: &Path, command: &str, status: i32, elapsed: f64) {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let line = format!("unix_time={stamp} command={command} exit={status} elapsed_s={elapsed:.3}\n");
    let result = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join("run.log"))
        .and_then(|mut f| f.write_all(line.as_bytes()));
    if let Err(e) = result {
        log::warn!("could not write run.log: {e}");
    }
}
