//! Monte Carlo study of type I error and power.
//!
//! Lifetimes come from piecewise-exponential or Weibull laws, censoring from
//! `U(0, a)` with `a` calibrated per group to a target censoring fraction.

mod hazard;
mod scenario;
mod study;
mod summary;

pub use hazard::{calibrate_censoring, sample_lifetime, HazardSpec};
pub use scenario::{
    generate_dataset, study_grid, DatasetGenerator, Preset, ScenarioSpec, Situation,
    CENSOR_TARGETS, DEFAULT_ALPHA, SIZE_PAIRS,
};
pub use study::{run_cell, run_study, CellResult, StudyResult, TestKind, TestTally};
pub use summary::{summarize_study, SummaryMode, SummaryRow, SummaryTable};
