use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{abs_statistic, abs_statistic_clipped, AbsOptions};
use crate::error::{Error, Result};
use crate::rng;
use crate::surv::Sample;

pub const DEFAULT_RESAMPLES: usize = 1000;

/// When a resampled |Δ| counts against the observed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exceedance {
    /// `|Δ(n)| > |Δ|`
    #[default]
    Strict,
    /// `|Δ(n)| >= |Δ|`
    AtLeast,
}

impl Exceedance {
    fn counts(self, resampled: f64, observed: f64) -> bool {
        match self {
            Exceedance::Strict => resampled.abs() > observed.abs(),
            Exceedance::AtLeast => resampled.abs() >= observed.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationOptions {
    pub n_resamples: usize,
    pub seed: u64,
    pub abs: AbsOptions,
    pub exceedance: Exceedance,
}

impl Default for PermutationOptions {
    fn default() -> Self {
        Self {
            n_resamples: DEFAULT_RESAMPLES,
            seed: 0,
            abs: AbsOptions::default(),
            exceedance: Exceedance::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationResult {
    /// `exceedances / n_resamples`, no +1 correction.
    pub p_value: f64,
    pub exceedances: usize,
    pub n_resamples: usize,
    pub observed_delta: f64,
    pub observed_abs: f64,
    /// Δ of each resample in resample order; degenerate resamples hold 0.
    pub resampled_deltas: Vec<f64>,
    /// Resamples whose null variance vanished (or whose window fell outside
    /// their follow-up); they are scored as Δ = 0.
    pub degenerate: usize,
    pub seed: u64,
}

/// Splits the pooled observations at random into groups of sizes `n1` and
/// `n2 = pooled.len() - n1`.
///
/// The pooled indices are shuffled with Fisher-Yates and the first
/// `min(n1, n2)` shuffled positions form the smaller group (group 1 on a
/// tie). Relabelling the groups therefore yields the same split.
pub fn resample_split<R: Rng + ?Sized>(pooled: &Sample, n1: usize, rng: &mut R) -> (Sample, Sample) {
    let n = pooled.len();
    assert!(n1 >= 1 && n1 < n, "both groups need at least one observation");
    let n2 = n - n1;
    let mut order: Vec<usize> = (0..n).collect();
    rng::fisher_yates(&mut order, rng);
    let mut in_first = vec![false; n];
    for &i in &order[..n1.min(n2)] {
        in_first[i] = true;
    }
    let (mut small, mut large) = (Vec::with_capacity(n1.min(n2)), Vec::with_capacity(n1.max(n2)));
    for (obs, &flag) in pooled.observations().iter().zip(&in_first) {
        if flag {
            small.push(*obs);
        } else {
            large.push(*obs);
        }
    }
    let (small, large) = (Sample::from_sorted(small), Sample::from_sorted(large));
    if n1 <= n2 {
        (small, large)
    } else {
        (large, small)
    }
}

/// ABS permutation test over `options.abs.interval`.
///
/// Each resample recomputes the pooled grid, the follow-up end, both curves
/// and the null moments from the resampled data alone; resample `n` draws
/// from its own stream `(seed, n)` so the result does not depend on
/// scheduling.
pub fn permutation_test(
    sample1: &Sample,
    sample2: &Sample,
    options: &PermutationOptions,
) -> Result<PermutationResult> {
    if options.n_resamples == 0 {
        return Err(Error::InvalidParameter(
            "n_resamples must be at least 1".into(),
        ));
    }
    let pooled = Sample::pooled(sample1, sample2);
    let first = pooled.observations()[0];
    if pooled.observations().iter().all(|o| *o == first) {
        return Err(Error::CannotPermute(
            "fewer than 2 distinct observations pooled".into(),
        ));
    }
    let observed = abs_statistic(sample1, sample2, &options.abs)?;
    let n1 = sample1.len();

    let key = rng::derive_key(options.seed, &[]);
    let draws: Vec<Option<f64>> = (0..options.n_resamples)
        .into_par_iter()
        .map(|n| {
            let mut rng = rng::stream(key, n as u64);
            let (a, b) = resample_split(&pooled, n1, &mut rng);
            abs_statistic_clipped(&a, &b, &options.abs)
                .ok()
                .map(|r| r.delta)
        })
        .collect();

    let degenerate = draws.iter().filter(|d| d.is_none()).count();
    let resampled_deltas: Vec<f64> = draws.into_iter().map(|d| d.unwrap_or(0.0)).collect();
    let exceedances = resampled_deltas
        .iter()
        .filter(|&&d| options.exceedance.counts(d, observed.delta))
        .count();

    Ok(PermutationResult {
        p_value: exceedances as f64 / options.n_resamples as f64,
        exceedances,
        n_resamples: options.n_resamples,
        observed_delta: observed.delta,
        observed_abs: observed.abs_value,
        resampled_deltas,
        degenerate,
        seed: options.seed,
    })
}
