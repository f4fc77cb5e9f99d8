use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_lr};

use crate::error::{Error, Result};

/// Lifetime distribution of one simulated arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HazardSpec {
    /// Constant hazard `rates[i]` on the i-th segment. `breaks` holds the
    /// upper ends of all segments but the last, which is unbounded.
    PiecewiseExponential { breaks: Vec<f64>, rates: Vec<f64> },
    /// Survival `exp(-(t / scale)^shape)`.
    Weibull { shape: f64, scale: f64 },
}

impl HazardSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::piecewise(vec![], vec![rate])
    }

    pub fn piecewise(breaks: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        let spec = HazardSpec::PiecewiseExponential { breaks, rates };
        spec.validate()?;
        Ok(spec)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        let spec = HazardSpec::Weibull { shape, scale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            HazardSpec::PiecewiseExponential { breaks, rates } => {
                if rates.len() != breaks.len() + 1 {
                    return bad(format!(
                        "{} rates need {} breakpoints, got {}",
                        rates.len(),
                        rates.len().saturating_sub(1),
                        breaks.len()
                    ));
                }
                if rates.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
                    return bad(format!("hazard rates must be positive: {rates:?}"));
                }
                let increasing = breaks.first().is_none_or(|&b| b > 0.0)
                    && breaks.windows(2).all(|w| w[0] < w[1])
                    && breaks.iter().all(|b| b.is_finite());
                if !increasing {
                    return bad(format!(
                        "breakpoints must be positive and strictly increasing: {breaks:?}"
                    ));
                }
                Ok(())
            }
            HazardSpec::Weibull { shape, scale } => {
                if !(*shape > 0.0 && *scale > 0.0 && shape.is_finite() && scale.is_finite()) {
                    return bad(format!(
                        "Weibull parameters must be positive: shape {shape}, scale {scale}"
                    ));
                }
                Ok(())
            }
        }
    }

    /// Segments as `(start, end, rate)` with the last `end` infinite.
    fn segments<'a>(breaks: &'a [f64], rates: &'a [f64]) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
        rates.iter().enumerate().map(move |(i, &rate)| {
            let start = if i == 0 { 0.0 } else { breaks[i - 1] };
            let end = breaks.get(i).copied().unwrap_or(f64::INFINITY);
            (start, end, rate)
        })
    }

    pub fn cumulative_hazard(&self, t: f64) -> f64 {
        match self {
            HazardSpec::PiecewiseExponential { breaks, rates } => Self::segments(breaks, rates)
                .take_while(|&(start, _, _)| start < t)
                .map(|(start, end, rate)| rate * (end.min(t) - start))
                .sum(),
            HazardSpec::Weibull { shape, scale } => (t / scale).powf(*shape),
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        (-self.cumulative_hazard(t)).exp()
    }

    /// The time at which the cumulative hazard reaches `h`.
    pub fn inverse_cumulative_hazard(&self, h: f64) -> f64 {
        match self {
            HazardSpec::PiecewiseExponential { breaks, rates } => {
                let mut acc = 0.0;
                for (start, end, rate) in Self::segments(breaks, rates) {
                    let seg = rate * (end - start);
                    if h <= acc + seg {
                        return start + (h - acc) / rate;
                    }
                    acc += seg;
                }
                unreachable!("last segment is unbounded")
            }
            HazardSpec::Weibull { shape, scale } => scale * h.powf(1.0 / shape),
        }
    }

    /// Inverse-transform draw for a given uniform `u` in (0, 1).
    pub fn lifetime_from_uniform(&self, u: f64) -> f64 {
        self.inverse_cumulative_hazard(-u.ln())
    }

    /// `∫_0^a S(c) dc`.
    fn integrated_survival(&self, a: f64) -> f64 {
        match self {
            HazardSpec::PiecewiseExponential { breaks, rates } => {
                let mut acc_h = 0.0_f64;
                let mut total = 0.0;
                for (start, end, rate) in Self::segments(breaks, rates) {
                    if start >= a {
                        break;
                    }
                    let stop = end.min(a);
                    let width = stop - start;
                    total += (-acc_h).exp()
                        * if rate > 0.0 {
                            -(-rate * width).exp_m1() / rate
                        } else {
                            width
                        };
                    acc_h += rate * width;
                }
                total
            }
            HazardSpec::Weibull { shape, scale } => {
                let k = 1.0 / shape;
                scale * k * gamma(k) * gamma_lr(k, (a / scale).powf(*shape))
            }
        }
    }

    /// Probability that a `U(0, a)` censoring time precedes the lifetime.
    pub fn censoring_probability(&self, a: f64) -> f64 {
        if a.is_infinite() {
            0.0
        } else if a <= 0.0 {
            1.0
        } else {
            self.integrated_survival(a) / a
        }
    }
}

pub fn sample_lifetime<R: Rng + ?Sized>(hazard: &HazardSpec, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    hazard.lifetime_from_uniform(u)
}

/// Upper bound `a` of `U(0, a)` censoring giving the target censoring
/// probability; `f64::INFINITY` (no censoring) for a zero target.
pub fn calibrate_censoring(hazard: &HazardSpec, target: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::InvalidParameter(format!(
            "censoring target must lie in [0, 1), got {target}"
        )));
    }
    hazard.validate()?;
    if target == 0.0 {
        return Ok(f64::INFINITY);
    }
    // censoring_probability falls from 1 to 0 as a grows
    let mut hi = 1.0;
    while hazard.censoring_probability(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hazard.censoring_probability(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn exponential_inverse_closed_form() {
        let h = HazardSpec::exponential(0.2).unwrap();
        let t = h.lifetime_from_uniform(0.5);
        assert!((t - 3.465735902799726).abs() < 1e-12);
        assert!((t - (-(0.5f64).ln() / 0.2)).abs() < 1e-15);
    }

    #[test]
    fn piecewise_boundary_draw() {
        let h = HazardSpec::piecewise(vec![0.8], vec![1.0, 0.5]).unwrap();
        assert_eq!(h.inverse_cumulative_hazard(0.8), 0.8);
        // beyond the break the slope is 1/0.5
        assert!((h.inverse_cumulative_hazard(1.0) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn piecewise_round_trip() {
        let h = HazardSpec::piecewise(vec![0.8, 1.8, 2.6], vec![1.2, 0.1, 0.5, 1.0]).unwrap();
        for i in 1..400 {
            let target = i as f64 * 0.01;
            let t = h.inverse_cumulative_hazard(target);
            assert!((h.cumulative_hazard(t) - target).abs() < 1e-12);
        }
    }

    #[test]
    fn weibull_shape_one_is_exponential() {
        let w = HazardSpec::weibull(1.0, 4.0).unwrap();
        let e = HazardSpec::exponential(0.25).unwrap();
        for u in [0.01, 0.3, 0.5, 0.9] {
            let a = w.lifetime_from_uniform(u);
            let b = e.lifetime_from_uniform(u);
            assert!((a - b).abs() < 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(HazardSpec::piecewise(vec![1.0], vec![1.0]).is_err());
        assert!(HazardSpec::piecewise(vec![2.0, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(HazardSpec::exponential(0.0).is_err());
        assert!(HazardSpec::weibull(-1.0, 1.0).is_err());
    }

    /// Independent bisection on the closed form for an exponential lifetime
    /// against U(0, a) censoring: (1 - e^{-λa}) / (λa).
    fn exp_censor_oracle(rate: f64, target: f64) -> f64 {
        let p = |a: f64| (1.0 - (-rate * a).exp()) / (rate * a);
        let (mut lo, mut hi) = (1e-9, 1e6);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if p(mid) > target {
                lo = mid
            } else {
                hi = mid
            }
        }
        lo
    }

    #[test]
    fn exponential_calibration_matches_oracle() {
        let h = HazardSpec::exponential(0.25).unwrap();
        let a = calibrate_censoring(&h, 0.30).unwrap();
        let want = exp_censor_oracle(0.25, 0.30);
        assert!((a - want).abs() < 1e-8 * want, "{a} vs {want}");
        assert_eq!(calibrate_censoring(&h, 0.0).unwrap(), f64::INFINITY);
        assert!(calibrate_censoring(&h, 1.0).is_err());
    }

    #[test]
    fn weibull_integral_matches_quadrature() {
        let h = HazardSpec::weibull(1.5, 5.0).unwrap();
        let a = 7.3;
        let n = 200_000;
        let dx = a / n as f64;
        let quad: f64 = (0..n).map(|i| h.survival((i as f64 + 0.5) * dx) * dx).sum();
        assert!((h.integrated_survival(a) - quad).abs() < 1e-8);
    }

    #[test]
    fn calibrated_bound_replays_to_target() {
        let cases = [
            HazardSpec::exponential(0.25).unwrap(),
            HazardSpec::weibull(1.5, 5.0).unwrap(),
            HazardSpec::piecewise(vec![2.0], vec![0.25, 1.0 / 35.0]).unwrap(),
        ];
        for (k, h) in cases.iter().enumerate() {
            let a = calibrate_censoring(h, 0.30).unwrap();
            let mut rng = rng::stream(99, k as u64);
            let n = 100_000;
            let censored = (0..n)
                .filter(|_| {
                    let x = sample_lifetime(h, &mut rng);
                    let c = a * rng.random::<f64>();
                    c < x
                })
                .count();
            let rate = censored as f64 / n as f64;
            assert!((rate - 0.30).abs() < 0.01, "{h:?}: {rate}");
        }
    }
}
