//! Run configuration: a JSON file, overridden by command-line flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use lattice_spectral::{DecayNorm, Potential};

use crate::CliError;

pub const DEFAULT_WINDOW: i64 = 400;
pub const DEFAULT_SIGMA: f64 = 3.0;

/// A potential given inline or as a path to a JSON file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PotentialSource {
    Inline(Potential),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// Neighbourhoods of `0` and `±π`.
    Chi0,
    /// The complement, which contains `θ = ±π/2`.
    Chi,
}

/// Config file contents. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub potential: Option<PotentialSource>,
    pub window: Option<i64>,
    pub sigma: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
    pub fit_min: Option<f64>,
    pub norm: Option<DecayNorm>,
    pub omegas: Option<Vec<f64>>,
    pub edge_omegas: Option<Vec<f64>>,
    pub eps_exponents: Option<(i32, i32)>,
    pub observation: Option<i64>,
    pub theta0: Option<f64>,
    pub cutoff: Option<CutoffKind>,
    pub a_range: Option<(f64, f64)>,
    pub a_step: Option<f64>,
    pub thetas: Option<Vec<f64>>,
    pub ensemble: Option<usize>,
    pub seed: Option<u64>,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub window: Option<i64>,
    pub sigma: Option<f64>,
    pub tmax: Option<f64>,
    pub seed: Option<u64>,
}

/// The fully resolved configuration, echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub potential: Potential,
    pub window: i64,
    pub sigma: f64,
    /// Sample times for `decay-fit`, `evolve` and `oscillatory`.
    pub times: Vec<f64>,
    pub fit_min: f64,
    pub norm: DecayNorm,
    /// Interior energies for the limiting-absorption table.
    pub omegas: Vec<f64>,
    /// Energies near the lower edge for the Puiseux table.
    pub edge_omegas: Vec<f64>,
    /// `ε = 2^{-k}` for `k` in this inclusive range.
    pub eps_exponents: (i32, i32),
    /// Half-width of kernel dumps.
    pub observation: i64,
    pub theta0: f64,
    pub cutoff: CutoffKind,
    pub a_range: (f64, f64),
    pub a_step: f64,
    pub thetas: Vec<f64>,
    pub ensemble: usize,
    pub seed: u64,
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    lattice_spectral::evolution::log_spaced(lo, hi, count)
}

fn load_potential(source: PotentialSource, base: Option<&Path>) -> Result<Potential, CliError> {
    match source {
        PotentialSource::Inline(v) => Ok(v),
        PotentialSource::File(path) => {
            let path = match base {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path,
            };
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::validation(format!("cannot read potential file {}: {e}", path.display())))?;
            Potential::from_json_str(&text)
                .map_err(|e| CliError::validation(format!("potential file {}: {e}", path.display())))
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
    }

    /// Merge file and flags, fill defaults for `command`, and validate.
    pub fn resolve(
        command: &str,
        file: FileConfig,
        flags: Overrides,
        config_dir: Option<&Path>,
    ) -> Result<Self, CliError> {
        let window = flags.window.or(file.window).unwrap_or(DEFAULT_WINDOW);
        let potential = match file.potential {
            Some(src) => load_potential(src, config_dir)?,
            None => Potential::delta(0, -1.5),
        };
        let tmax = flags.tmax.or(file.tmax);
        let samples = file.samples.unwrap_or(8);
        let times = match (file.times, command) {
            (Some(times), _) if flags.tmax.is_none() => times,
            (_, "oscillatory") => log_spaced(file.tmin.unwrap_or(100.0), tmax.unwrap_or(1000.0), samples),
            (_, "evolve") => vec![tmax.unwrap_or(10.0)],
            _ => {
                // the largest time the window supports
                let t_hi = tmax.unwrap_or(((window - lattice_spectral::evolution::WINDOW_MARGIN) / 2) as f64);
                log_spaced(file.tmin.unwrap_or(50.0), t_hi, samples)
            }
        };
        let cfg = Self {
            command: command.to_string(),
            potential,
            window,
            sigma: flags.sigma.or(file.sigma).unwrap_or(DEFAULT_SIGMA),
            times,
            fit_min: file.fit_min.unwrap_or(50.0),
            norm: file.norm.unwrap_or(DecayNorm::Weighted),
            omegas: file.omegas.unwrap_or_else(|| vec![1.0, 2.0, 3.0]),
            edge_omegas: file.edge_omegas.unwrap_or_else(|| log_spaced(1e-4, 1e-2, 7)),
            eps_exponents: file.eps_exponents.unwrap_or((4, 14)),
            observation: file.observation.unwrap_or(20.min(window)),
            theta0: file.theta0.unwrap_or(PI / 4.0),
            cutoff: file.cutoff.unwrap_or(CutoffKind::Chi),
            a_range: file.a_range.unwrap_or((-4.0, 4.0)),
            a_step: file.a_step.unwrap_or(0.01),
            thetas: file
                .thetas
                .unwrap_or_else(|| (1..=16).map(|k| -PI * k as f64 / 17.0).collect()),
            ensemble: file.ensemble.unwrap_or(0),
            seed: flags.seed.or(file.seed).unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::validation(msg));
        if self.window < 1 {
            return fail(format!("window must be a positive half-width, got {}", self.window));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return fail(format!("sigma must be finite and nonnegative, got {}", self.sigma));
        }
        let timed = matches!(self.command.as_str(), "decay-fit" | "evolve" | "oscillatory");
        if timed && (self.times.is_empty() || self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0))) {
            return fail("times must be finite and nonnegative".into());
        }
        if self.observation < 0 || self.observation > self.window {
            return fail(format!("observation {} must lie in [0, window]", self.observation));
        }
        if self.omegas.iter().chain(&self.edge_omegas).any(|w| !(*w > 0.0 && *w < 4.0)) {
            return fail("omegas must lie strictly inside (0, 4)".into());
        }
        if self.eps_exponents.0 > self.eps_exponents.1 {
            return fail("eps_exponents must be an increasing pair".into());
        }
        if self.a_step.is_nan() || self.a_step <= 0.0 || self.a_range.0 > self.a_range.1 {
            return fail("a_step must be positive and a_range increasing".into());
        }
        if self.thetas.iter().any(|t| !(*t > -PI && *t < 0.0)) {
            return fail("thetas must lie in (-pi, 0)".into());
        }
        Ok(())
    }
}
