//! Run configuration files.
//!
//! Configs are flat `key = value` files (TOML syntax, no tables). Unknown keys
//! are rejected so typos surface instead of being ignored. A relative `input`
//! resolves against the config file's directory; `out_dir` against the
//! working directory.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::abs::{IntervalMode, DEFAULT_RESAMPLES, DEFAULT_RHO};
use crate::compare::Ties;
use crate::error::{Error, Result};
use crate::sim::{Preset, Situation, DEFAULT_ALPHA};
use crate::surv::FollowUpRule;

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Permutation count for `analyze` and `simulate`, draw count for
    /// `diagnose-null`.
    pub resamples: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub group_column: String,
    /// Label of the first sample; with both labels unset, labels are taken
    /// in order of first appearance.
    pub group1: Option<String>,
    pub group2: Option<String>,
    pub time_column: String,
    /// 1 = event, 0 = censored.
    pub status_column: String,
    /// Split point for the left/right interval tests.
    pub split: Option<f64>,
    pub n_resamples: usize,
    pub n_boot: usize,
    pub seed: u64,
    pub alpha: f64,
    pub level: f64,
    /// RMST horizon; defaults to the follow-up end `v`.
    pub tau: Option<f64>,
    pub interval_mode: IntervalMode,
    pub rho: f64,
    pub follow_up: FollowUpRule,
    pub ties: Ties,
    pub out_dir: PathBuf,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            group_column: "group".into(),
            group1: None,
            group2: None,
            time_column: "time".into(),
            status_column: "status".into(),
            split: None,
            n_resamples: DEFAULT_RESAMPLES,
            n_boot: 1000,
            seed: 1,
            alpha: DEFAULT_ALPHA,
            level: 0.95,
            tau: None,
            interval_mode: IntervalMode::default(),
            rho: DEFAULT_RHO,
            follow_up: FollowUpRule::default(),
            ties: Ties::default(),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl AnalysisConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(n) = o.resamples {
            self.n_resamples = n;
        }
        if let Some(dir) = &o.out_dir {
            self.out_dir = dir.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input.as_os_str().is_empty() {
            return Err(Error::Config("`input` is required".into()));
        }
        if self.group1.is_some() != self.group2.is_some() {
            return Err(Error::Config("set both `group1` and `group2` or neither".into()));
        }
        if self.group1.is_some() && self.group1 == self.group2 {
            return Err(Error::Config("`group1` and `group2` must differ".into()));
        }
        if self.n_resamples == 0 {
            return Err(Error::Config("`n_resamples` must be positive".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config(format!("`level` must lie in (0, 1), got {}", self.level)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("`alpha` must lie in (0, 1), got {}", self.alpha)));
        }
        if let Some(s) = self.split {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("`split` must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    /// Roman numerals, e.g. `["I", "V"]`.
    pub situations: Vec<String>,
    pub preset: String,
    /// Restrict the grid to these `[n1, n2]` pairs.
    pub sizes: Option<Vec<[usize; 2]>>,
    /// Restrict the grid to these censoring targets.
    pub censor_targets: Option<Vec<f64>>,
    pub iterations: Option<usize>,
    pub permutations: Option<usize>,
    pub alpha: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            situations: Situation::ALL.iter().map(|s| s.to_string()).collect(),
            preset: "full".into(),
            sizes: None,
            censor_targets: None,
            iterations: None,
            permutations: None,
            alpha: DEFAULT_ALPHA,
            seed: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl SimulateConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(n) = o.resamples {
            self.permutations = Some(n);
        }
        if let Some(dir) = &o.out_dir {
            self.out_dir = dir.clone();
        }
    }

    pub fn situations(&self) -> Result<Vec<Situation>> {
        if self.situations.is_empty() {
            return Err(Error::Config("`situations` is empty".into()));
        }
        self.situations.iter().map(|s| s.parse()).collect()
    }

    pub fn preset(&self) -> Result<Preset> {
        self.preset.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub situation: String,
    pub n1: usize,
    pub n2: usize,
    pub censor_target: f64,
    pub draws: usize,
    pub bins: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self {
            situation: "I".into(),
            n1: 50,
            n2: 50,
            censor_target: 0.0,
            draws: 1000,
            bins: 30,
            seed: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl DiagnoseConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(n) = o.resamples {
            self.draws = n;
        }
        if let Some(dir) = &o.out_dir {
            self.out_dir = dir.clone();
        }
    }
}

/// Parses a config from text.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if !p.as_os_str().is_empty() && p.is_relative() {
        *p = base.join(&*p);
    }
}

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn load_analysis_config(path: &Path) -> Result<AnalysisConfig> {
    let mut cfg: AnalysisConfig = read_config(path)?;
    resolve(&base_dir(path), &mut cfg.input);
    Ok(cfg)
}

pub fn load_simulate_config(path: &Path) -> Result<SimulateConfig> {
    read_config(path)
}

pub fn load_diagnose_config(path: &Path) -> Result<DiagnoseConfig> {
    read_config(path)
}
