//! Area between two Kaplan-Meier curves and its null-hypothesis moments.
//!
//! The area is computed as a rectangle sum over the pooled event grid, which is
//! exact for the right-continuous step curves produced by
//! [`km_estimate`](crate::surv::km_estimate). Under the null hypothesis each
//! pointwise difference is treated as centred normal with variance
//! `σ²₁(t) + σ²₂(t)`, which yields a mean and variance for the area and the
//! standardized statistic
//!
//! ```text
//! Δ = (ABS - E[ABS]) / sqrt(V[ABS])
//! ```
//!
//! Pairwise correlations between grid points are set to a constant `rho`
//! (0.5 by default).

mod bootstrap;
mod diagnostic;
mod permutation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{normal_two_sided_p, TestResult};
use crate::surv::{km_estimate, pooled_grid, FollowUpRule, PooledGrid, Sample, StepCurve};

pub use bootstrap::abs_confidence_interval;
pub use diagnostic::{null_delta_diagnostic, NullDiagnostic};
pub use permutation::{
    permutation_test, resample_split, Exceedance, PermutationOptions, PermutationResult,
    DEFAULT_RESAMPLES,
};

pub const DEFAULT_RHO: f64 = 0.5;

const TWO_OVER_PI: f64 = std::f64::consts::FRAC_2_PI;

/// How rectangles are cut at the interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMode {
    /// Rectangles are clipped to `[start, end]`; the stretch from `start` to
    /// the next event uses the survival values in force at `start`. Areas over
    /// adjacent intervals add up exactly.
    #[default]
    Clamped,
    /// Grid points with `start < t_j < end` (or `t_j < end` when `start` is 0)
    /// contribute their full gap to the next event time or `v`.
    GridPoints,
}

impl IntervalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            IntervalMode::Clamped => "clamped",
            IntervalMode::GridPoints => "grid_points",
        }
    }
}

/// Analysis window `[start, end]`. `end = None` means the follow-up end `v`
/// of whatever dataset the window is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub start: f64,
    pub end: Option<f64>,
    pub mode: IntervalMode,
}

impl Default for IntervalSpec {
    fn default() -> Self {
        Self::full()
    }
}

impl IntervalSpec {
    pub fn full() -> Self {
        Self {
            start: 0.0,
            end: None,
            mode: IntervalMode::default(),
        }
    }

    pub fn new(start: f64, end: Option<f64>, mode: IntervalMode) -> Self {
        Self { start, end, mode }
    }

    pub fn with_mode(mut self, mode: IntervalMode) -> Self {
        self.mode = mode;
        self
    }

    /// Concrete `[start, end]` for a dataset with follow-up end `v`.
    pub fn resolve(&self, v: f64) -> Result<(f64, f64)> {
        let end = self.end.unwrap_or(v);
        if !(self.start >= 0.0 && self.start < end && end <= v) {
            return Err(Error::IntervalOutOfRange {
                start: self.start,
                end,
                follow_up_end: v,
            });
        }
        Ok((self.start, end))
    }

    /// Like [`resolve`](Self::resolve), but a fixed end beyond `v` is pulled
    /// back to `v`. Used on resampled data whose `v` differs from the
    /// original.
    pub fn resolve_clipped(&self, v: f64) -> Result<(f64, f64)> {
        let clipped = Self {
            end: self.end.map(|e| e.min(v)),
            ..*self
        };
        clipped.resolve(v)
    }
}

/// One rectangle of the area sum: width and both curves' values at its left edge.
#[derive(Debug, Clone, Copy)]
struct Cell {
    width: f64,
    s1: f64,
    s2: f64,
    var_sum: f64,
}

fn cells(
    curve1: &StepCurve,
    curve2: &StepCurve,
    grid: &PooledGrid,
    (start, end): (f64, f64),
    mode: IntervalMode,
) -> Vec<Cell> {
    let v = grid.v;
    let cell_at = |left: f64, width: f64| {
        let (s1, v1) = curve1.eval(left);
        let (s2, v2) = curve2.eval(left);
        Cell {
            width,
            s1,
            s2,
            var_sum: v1 + v2,
        }
    };
    let times = &grid.times;
    match mode {
        IntervalMode::GridPoints => times
            .iter()
            .enumerate()
            .filter(|&(_, &t)| (t > start || start == 0.0) && t < end && t < v)
            .map(|(j, &t)| {
                let next = times.get(j + 1).copied().unwrap_or(v).min(v);
                cell_at(t, next - t)
            })
            .collect(),
        IntervalMode::Clamped => {
            let inner = times.iter().copied().filter(|&t| t > start && t < end);
            let lefts: Vec<f64> = std::iter::once(start).chain(inner).collect();
            lefts
                .iter()
                .enumerate()
                .map(|(k, &left)| {
                    let right = lefts.get(k + 1).copied().unwrap_or(end);
                    cell_at(left, right - left)
                })
                .collect()
        }
    }
}

fn checked_cells(
    curve1: &StepCurve,
    curve2: &StepCurve,
    grid: &PooledGrid,
    interval: &IntervalSpec,
) -> Result<Vec<Cell>> {
    let bounds = interval.resolve(grid.v)?;
    Ok(cells(curve1, curve2, grid, bounds, interval.mode))
}

/// Area between the two curves over `interval`.
pub fn abs_measure(
    curve1: &StepCurve,
    curve2: &StepCurve,
    grid: &PooledGrid,
    interval: &IntervalSpec,
) -> Result<f64> {
    let cells = checked_cells(curve1, curve2, grid, interval)?;
    Ok(area(&cells))
}

fn area(cells: &[Cell]) -> f64 {
    cells.iter().map(|c| (c.s1 - c.s2).abs() * c.width).sum()
}

/// Null mean and variance of the area, in that order.
pub fn null_moments(
    curve1: &StepCurve,
    curve2: &StepCurve,
    grid: &PooledGrid,
    interval: &IntervalSpec,
    rho: f64,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in [0, 1], got {rho}"
        )));
    }
    let cells = checked_cells(curve1, curve2, grid, interval)?;
    moments(&cells, rho)
}

fn moments(cells: &[Cell], rho: f64) -> Result<(f64, f64)> {
    // a_j = sd_j * gap_j; the double sum over j < j' of 2 rho a_j a_j'
    // collapses to rho * ((sum a)^2 - sum a^2) for constant rho.
    let (sum, sum_sq) = cells.iter().fold((0.0, 0.0), |(s, ss), c| {
        let a = c.var_sum.sqrt() * c.width;
        (s + a, ss + a * a)
    });
    let e_null = TWO_OVER_PI.sqrt() * sum;
    let v_null = (1.0 - TWO_OVER_PI) * ((1.0 - rho) * sum_sq + rho * sum * sum);
    if !(v_null > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((e_null, v_null))
}

pub fn delta_statistic(abs_value: f64, e_null: f64, v_null: f64) -> Result<f64> {
    if !(v_null > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((abs_value - e_null) / v_null.sqrt())
}

/// Settings shared by every ABS-based statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsOptions {
    pub interval: IntervalSpec,
    pub rho: f64,
    pub follow_up: FollowUpRule,
}

impl Default for AbsOptions {
    fn default() -> Self {
        Self {
            interval: IntervalSpec::full(),
            rho: DEFAULT_RHO,
            follow_up: FollowUpRule::default(),
        }
    }
}

impl AbsOptions {
    pub fn with_interval(mut self, interval: IntervalSpec) -> Self {
        self.interval = interval;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsResult {
    pub abs_value: f64,
    pub e_null: f64,
    pub v_null: f64,
    pub delta: f64,
    pub rho: f64,
    pub start: f64,
    pub end: f64,
    pub follow_up_end: f64,
}

/// Area, null moments and Δ computed from two samples.
pub fn abs_statistic(sample1: &Sample, sample2: &Sample, options: &AbsOptions) -> Result<AbsResult> {
    let grid = pooled_grid(sample1, sample2, options.follow_up)?;
    let bounds = options.interval.resolve(grid.v)?;
    statistic_on(sample1, sample2, &grid, bounds, options)
}

/// Same as [`abs_statistic`] but with a fixed interval end clipped to the
/// dataset's own `v`.
pub(crate) fn abs_statistic_clipped(
    sample1: &Sample,
    sample2: &Sample,
    options: &AbsOptions,
) -> Result<AbsResult> {
    let grid = pooled_grid(sample1, sample2, options.follow_up)?;
    let bounds = options.interval.resolve_clipped(grid.v)?;
    statistic_on(sample1, sample2, &grid, bounds, options)
}

fn statistic_on(
    sample1: &Sample,
    sample2: &Sample,
    grid: &PooledGrid,
    bounds: (f64, f64),
    options: &AbsOptions,
) -> Result<AbsResult> {
    let c1 = km_estimate(sample1);
    let c2 = km_estimate(sample2);
    let cells = cells(&c1, &c2, grid, bounds, options.interval.mode);
    let abs_value = area(&cells);
    let (e_null, v_null) = moments(&cells, options.rho)?;
    Ok(AbsResult {
        abs_value,
        e_null,
        v_null,
        delta: delta_statistic(abs_value, e_null, v_null)?,
        rho: options.rho,
        start: bounds.0,
        end: bounds.1,
        follow_up_end: grid.v,
    })
}

/// Area only; a dataset without events has two flat curves and zero area.
pub(crate) fn abs_value_only(sample1: &Sample, sample2: &Sample, options: &AbsOptions) -> Result<f64> {
    let grid = match pooled_grid(sample1, sample2, options.follow_up) {
        Ok(g) => g,
        Err(Error::NoEvents) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let bounds = options.interval.resolve_clipped(grid.v)?;
    let c1 = km_estimate(sample1);
    let c2 = km_estimate(sample2);
    Ok(area(&cells(&c1, &c2, &grid, bounds, options.interval.mode)))
}

/// Δ referred to the standard normal distribution (two-sided).
pub fn abs_normal_test(sample1: &Sample, sample2: &Sample, options: &AbsOptions) -> Result<TestResult> {
    let r = abs_statistic(sample1, sample2, options)?;
    Ok(TestResult::new("abs_normal", r.delta, normal_two_sided_p(r.delta))
        .with_estimate(r.abs_value, None)
        .with_extra("e_null", r.e_null)
        .with_extra("v_null", r.v_null)
        .with_extra("start", r.start)
        .with_extra("end", r.end))
}
