//! Shared result type and small numeric helpers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Outcome of one hypothesis test or effect estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub estimate: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub extras: BTreeMap<String, f64>,
}

impl TestResult {
    pub fn new(name: impl Into<String>, statistic: f64, p_value: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            estimate: None,
            ci_lo: None,
            ci_hi: None,
            extras: BTreeMap::new(),
        }
    }

    pub fn with_estimate(mut self, estimate: f64, ci: Option<(f64, f64)>) -> Self {
        self.estimate = Some(estimate);
        if let Some((lo, hi)) = ci {
            self.ci_lo = Some(lo);
            self.ci_hi = Some(hi);
        }
        self
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.get(key).copied()
    }
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// Two-sided standard normal P value.
pub fn normal_two_sided_p(z: f64) -> f64 {
    (2.0 * std_normal().sf(z.abs())).clamp(0.0, 1.0)
}

/// Upper `(1 - level) / 2` normal quantile, e.g. 1.959964 for `level = 0.95`.
pub fn normal_critical(level: f64) -> f64 {
    std_normal().inverse_cdf(0.5 + level / 2.0)
}

pub fn chi2_1df_sf(x: f64) -> f64 {
    ChiSquared::new(1.0)
        .expect("one degree of freedom")
        .sf(x)
        .clamp(0.0, 1.0)
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and nonempty.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bias-corrected skewness and excess kurtosis of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    /// Adjusted Fisher-Pearson skewness `G1`; NaN below 3 values.
    pub skewness: f64,
    /// Adjusted excess kurtosis `G2`; NaN below 4 values.
    pub excess_kurtosis: f64,
    /// False when `n < 8` or the sample has no spread.
    pub stable: bool,
}

pub const MIN_STABLE_MOMENTS: usize = 8;

pub fn moment_summary(values: &[f64]) -> MomentSummary {
    let n = values.len();
    let nf = n as f64;
    let mean = if n == 0 {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / nf
    };
    let central = |k: i32| values.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / nf;
    let m2 = central(2);
    let sd = if n > 1 { (m2 * nf / (nf - 1.0)).sqrt() } else { f64::NAN };

    let skewness = if n >= 3 && m2 > 0.0 {
        let g1 = central(3) / m2.powf(1.5);
        (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * g1
    } else {
        f64::NAN
    };
    let excess_kurtosis = if n >= 4 && m2 > 0.0 {
        let g2 = central(4) / (m2 * m2) - 3.0;
        ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0))
    } else {
        f64::NAN
    };
    MomentSummary {
        n,
        mean,
        sd,
        skewness,
        excess_kurtosis,
        stable: n >= MIN_STABLE_MOMENTS && m2 > 0.0,
    }
}

/// Equal-width histogram spanning `[min, max]` of `values`.
/// Returns `(left_edge, count)` per bin; the maximum falls in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &x in values {
        let k = (((x - lo) / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + k as f64 * width, c))
        .collect()
}
