use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hazard::{calibrate_censoring, sample_lifetime, HazardSpec};
use crate::error::{Error, Result};
use crate::surv::{Observation, Sample};

/// The six built-in generative situations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Situation {
    /// Overlapping curves (null).
    I,
    /// Proportional hazards.
    II,
    /// Early and middle differences.
    III,
    /// Late difference.
    IV,
    /// Crossing near the median.
    V,
    /// Late crossing.
    VI,
}

impl Situation {
    pub const ALL: [Situation; 6] = [
        Situation::I,
        Situation::II,
        Situation::III,
        Situation::IV,
        Situation::V,
        Situation::VI,
    ];

    pub fn roman(self) -> &'static str {
        match self {
            Situation::I => "I",
            Situation::II => "II",
            Situation::III => "III",
            Situation::IV => "IV",
            Situation::V => "V",
            Situation::VI => "VI",
        }
    }

    pub fn index(self) -> u64 {
        self as u64
    }

    pub fn is_null(self) -> bool {
        self == Situation::I
    }

    /// Lifetime laws of group 1 and group 2.
    pub fn hazards(self) -> (HazardSpec, HazardSpec) {
        let pw = |breaks: &[f64], rates: &[f64]| HazardSpec::PiecewiseExponential {
            breaks: breaks.to_vec(),
            rates: rates.to_vec(),
        };
        match self {
            Situation::I => (pw(&[], &[0.25]), pw(&[], &[0.25])),
            Situation::II => (pw(&[], &[0.5]), pw(&[], &[0.2])),
            Situation::III => (
                pw(&[0.8, 1.8, 2.6], &[1.2, 0.1, 0.5, 1.0]),
                pw(&[0.8, 1.8, 2.6], &[0.5, 0.1, 1.2, 1.0]),
            ),
            Situation::IV => (pw(&[0.8], &[1.0, 2.5]), pw(&[0.8], &[1.0, 0.5])),
            Situation::V => (pw(&[], &[1.0 / 12.0]), pw(&[2.0], &[0.25, 1.0 / 35.0])),
            Situation::VI => (
                HazardSpec::Weibull {
                    shape: 1.5,
                    scale: 5.0,
                },
                pw(&[1.5], &[0.5, 0.1]),
            ),
        }
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

impl FromStr for Situation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Situation::ALL
            .into_iter()
            .find(|sit| sit.roman().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scenario id {s:?}; valid ids are I, II, III, IV, V, VI"
                ))
            })
    }
}

/// Iteration and permutation counts of a study run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// 1000 datasets per cell, 1000 permutations per dataset.
    #[default]
    Full,
    /// 500 datasets per cell, 500 permutations per dataset.
    Desk,
}

impl Preset {
    pub fn iterations(self) -> usize {
        match self {
            Preset::Full => 1000,
            Preset::Desk => 500,
        }
    }

    pub fn permutations(self) -> usize {
        match self {
            Preset::Full => 1000,
            Preset::Desk => 500,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Preset::Full),
            "desk" => Ok(Preset::Desk),
            other => Err(Error::Config(format!(
                "unknown preset {other:?}; expected \"full\" or \"desk\""
            ))),
        }
    }
}

pub const SIZE_PAIRS: [(usize, usize); 5] = [(20, 20), (50, 50), (100, 100), (20, 50), (50, 100)];
pub const CENSOR_TARGETS: [f64; 4] = [0.0, 0.15, 0.30, 0.45];
pub const DEFAULT_ALPHA: f64 = 0.05;

/// One cell of a simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub situation: Situation,
    pub hazard1: HazardSpec,
    pub hazard2: HazardSpec,
    pub n1: usize,
    pub n2: usize,
    /// Target censoring fraction, calibrated separately in each group.
    pub censor_target: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub permutations: usize,
}

impl ScenarioSpec {
    pub fn builtin(situation: Situation, n1: usize, n2: usize, censor_target: f64) -> Self {
        let (hazard1, hazard2) = situation.hazards();
        Self {
            situation,
            hazard1,
            hazard2,
            n1,
            n2,
            censor_target,
            alpha: DEFAULT_ALPHA,
            iterations: Preset::Full.iterations(),
            permutations: Preset::Full.permutations(),
        }
    }

    pub fn with_preset(mut self, preset: Preset) -> Self {
        self.iterations = preset.iterations();
        self.permutations = preset.permutations();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.hazard1.validate()?;
        self.hazard2.validate()?;
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidParameter("group sizes must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.censor_target) {
            return Err(Error::InvalidParameter(format!(
                "censoring target must lie in [0, 1), got {}",
                self.censor_target
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.iterations == 0 || self.permutations == 0 {
            return Err(Error::InvalidParameter(
                "iterations and permutations must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Human-readable cell label, e.g. `I 50/50 CR=0.15`.
    pub fn label(&self) -> String {
        format!(
            "{} {}/{} CR={:.2}",
            self.situation, self.n1, self.n2, self.censor_target
        )
    }
}

/// Full grid of size pairs and censoring targets for the given situations.
pub fn study_grid(situations: &[Situation], preset: Preset) -> Vec<ScenarioSpec> {
    situations
        .iter()
        .flat_map(|&sit| {
            SIZE_PAIRS.iter().flat_map(move |&(n1, n2)| {
                CENSOR_TARGETS
                    .iter()
                    .map(move |&cr| ScenarioSpec::builtin(sit, n1, n2, cr).with_preset(preset))
            })
        })
        .collect()
}

/// Scenario with both censoring bounds calibrated once.
#[derive(Debug, Clone)]
pub struct DatasetGenerator {
    scenario: ScenarioSpec,
    bound1: f64,
    bound2: f64,
}

impl DatasetGenerator {
    pub fn new(scenario: &ScenarioSpec) -> Result<Self> {
        scenario.validate()?;
        Ok(Self {
            bound1: calibrate_censoring(&scenario.hazard1, scenario.censor_target)?,
            bound2: calibrate_censoring(&scenario.hazard2, scenario.censor_target)?,
            scenario: scenario.clone(),
        })
    }

    /// Censoring bounds `(a, b)`; infinite means no censoring.
    pub fn bounds(&self) -> (f64, f64) {
        (self.bound1, self.bound2)
    }

    pub fn scenario(&self) -> &ScenarioSpec {
        &self.scenario
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> (Sample, Sample) {
        let arm = |hazard: &HazardSpec, n: usize, bound: f64, rng: &mut R| {
            let obs = (0..n)
                .map(|_| {
                    let x = sample_lifetime(hazard, rng);
                    if bound.is_infinite() {
                        Observation { time: x, event: true }
                    } else {
                        let c = bound * rng.random::<f64>();
                        Observation {
                            time: x.min(c),
                            event: x <= c,
                        }
                    }
                })
                .collect();
            Sample::new(obs).expect("simulated times are finite and nonnegative")
        };
        let s = &self.scenario;
        let first = arm(&s.hazard1, s.n1, self.bound1, rng);
        let second = arm(&s.hazard2, s.n2, self.bound2, rng);
        (first, second)
    }
}

/// `T = min(X, C)`, `δ = I[X <= C]` for both groups of `scenario`.
pub fn generate_dataset<R: Rng + ?Sized>(scenario: &ScenarioSpec, rng: &mut R) -> Result<(Sample, Sample)> {
    Ok(DatasetGenerator::new(scenario)?.generate(rng))
}
