use rand::Rng;
use rayon::prelude::*;

use super::{abs_value_only, AbsOptions};
use crate::error::{Error, Result};
use crate::rng;
use crate::stats::quantile_sorted;
use crate::surv::{Observation, Sample};

pub const MIN_BOOTSTRAP: usize = 10;

fn resample_within<R: Rng + ?Sized>(sample: &Sample, rng: &mut R) -> Sample {
    let obs = sample.observations();
    let drawn: Vec<Observation> = (0..obs.len())
        .map(|_| obs[rng.random_range(0..obs.len())])
        .collect();
    Sample::new(drawn).expect("drawn from a valid sample")
}

fn canonical_order(a: &Sample, b: &Sample) -> bool {
    let key = |s: &Sample| -> Vec<(f64, bool)> {
        s.observations().iter().map(|o| (o.time, o.event)).collect()
    };
    match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Equal => key(a)
            .partial_cmp(&key(b))
            .is_none_or(|o| o != std::cmp::Ordering::Greater),
        o => o == std::cmp::Ordering::Less,
    }
}

/// Stratified percentile bootstrap interval for the area between curves.
///
/// Each replicate resamples both groups with replacement, keeping group sizes,
/// and recomputes the area with the replicate's own follow-up end (a fixed
/// interval end is clipped to it).
pub fn abs_confidence_interval(
    sample1: &Sample,
    sample2: &Sample,
    options: &AbsOptions,
    level: f64,
    n_boot: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if n_boot < MIN_BOOTSTRAP {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_BOOTSTRAP} bootstrap replicates, got {n_boot}"
        )));
    }
    // Draw in a canonical group order so that swapping the samples gives
    // the same interval.
    let (first, second) = if canonical_order(sample1, sample2) {
        (sample1, sample2)
    } else {
        (sample2, sample1)
    };
    let key = rng::derive_key(seed, &[0xb007]);
    let mut values = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(key, b as u64);
            let x = resample_within(first, &mut rng);
            let y = resample_within(second, &mut rng);
            abs_value_only(&x, &y, options).ok()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect::<Vec<f64>>();
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "no bootstrap replicate produced an area".into(),
        ));
    }
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((
        quantile_sorted(&values, tail),
        quantile_sorted(&values, 1.0 - tail),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups_interval_is_near_zero() {
        let s = Sample::from_pairs(&[
            (1.0, true),
            (2.0, true),
            (3.0, false),
            (4.0, true),
            (5.0, true),
            (6.0, false),
            (7.0, true),
            (8.0, true),
        ])
        .unwrap();
        let (lo, hi) = abs_confidence_interval(&s, &s, &AbsOptions::default(), 0.95, 200, 5).unwrap();
        assert!(lo >= 0.0);
        assert!(lo <= hi);
        assert!(lo < 0.5);
        let again = abs_confidence_interval(&s, &s, &AbsOptions::default(), 0.95, 200, 5).unwrap();
        assert_eq!((lo, hi), again);
    }

    #[test]
    fn rejects_bad_settings() {
        let s = Sample::from_pairs(&[(1.0, true), (2.0, true)]).unwrap();
        let o = AbsOptions::default();
        assert!(abs_confidence_interval(&s, &s, &o, 0.95, 9, 1).is_err());
        assert!(abs_confidence_interval(&s, &s, &o, 1.0, 100, 1).is_err());
    }

    #[test]
    fn interval_ignores_group_order() {
        let a = Sample::from_pairs(&[(1.0, true), (2.0, false), (4.0, true), (6.0, true)]).unwrap();
        let b = Sample::from_pairs(&[(1.5, true), (3.0, true), (5.0, false), (7.0, true)]).unwrap();
        let opts = AbsOptions::default();
        let ab = abs_confidence_interval(&a, &b, &opts, 0.9, 50, 3).unwrap();
        let ba = abs_confidence_interval(&b, &a, &opts, 0.9, 50, 3).unwrap();
        assert_eq!(ab, ba);
    }
}
