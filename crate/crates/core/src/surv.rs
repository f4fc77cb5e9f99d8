//! Kaplan-Meier estimation on right-censored samples.
//!
//! Every statistic in this crate is built on three pieces defined here:
//!
//! - [`km_estimate`] turns a [`Sample`] into a right-continuous [`StepCurve`]
//!   carrying product-limit survival and Greenwood variance at each event time.
//! - [`pooled_grid`] merges the event times of two samples and fixes the
//!   follow-up end `v` up to which areas under both curves are computable.
//! - [`median_survival`] reads the median off a curve, when it exists.
//!
//! ```
//! use abs_survival::surv::{km_estimate, Sample};
//!
//! let sample = Sample::from_pairs(&[(1.0, true), (3.0, true), (5.0, true)]).unwrap();
//! let curve = km_estimate(&sample);
//! assert_eq!(curve.grid(), &[1.0, 3.0, 5.0]);
//! assert!((curve.surv()[0] - 2.0 / 3.0).abs() < 1e-15);
//! ```

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One subject: observed time and whether the event was seen (`true`) or the
/// subject was censored (`false`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub event: bool,
}

impl Observation {
    pub fn new(time: f64, event: bool) -> Result<Self> {
        if !time.is_finite() || time < 0.0 {
            return Err(Error::InvalidTime(time));
        }
        Ok(Self { time, event })
    }

    /// Sort key: ascending time, events before censorings at equal times.
    fn order(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| other.event.cmp(&self.event))
    }
}

/// The observations of one arm, kept sorted by [`Observation`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    observations: Vec<Observation>,
}

impl Sample {
    pub fn new(mut observations: Vec<Observation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = observations
            .iter()
            .find(|o| !o.time.is_finite() || o.time < 0.0)
        {
            return Err(Error::InvalidTime(bad.time));
        }
        observations.sort_by(Observation::order);
        Ok(Self { observations })
    }

    pub fn from_pairs(pairs: &[(f64, bool)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(time, event)| Observation { time, event })
                .collect(),
        )
    }

    /// Builds a sample from observations already in sorted order.
    pub(crate) fn from_sorted(observations: Vec<Observation>) -> Self {
        debug_assert!(!observations.is_empty());
        debug_assert!(observations
            .windows(2)
            .all(|w| w[0].order(&w[1]) != Ordering::Greater));
        Self { observations }
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn n_events(&self) -> usize {
        self.observations.iter().filter(|o| o.event).count()
    }

    pub fn n_censored(&self) -> usize {
        self.len() - self.n_events()
    }

    /// Largest observation (ties resolved with censorings last).
    pub fn last(&self) -> Observation {
        *self.observations.last().expect("sample is never empty")
    }

    /// Copy of the sample with every time multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time scale factor must be positive, got {factor}"
            )));
        }
        Self::new(
            self.observations
                .iter()
                .map(|o| Observation {
                    time: o.time * factor,
                    event: o.event,
                })
                .collect(),
        )
    }

    /// Merges two sorted samples into one sorted sample.
    pub fn pooled(a: &Sample, b: &Sample) -> Sample {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let (xs, ys) = (&a.observations, &b.observations);
        while i < xs.len() && j < ys.len() {
            if xs[i].order(&ys[j]) != Ordering::Greater {
                out.push(xs[i]);
                i += 1;
            } else {
                out.push(ys[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&xs[i..]);
        out.extend_from_slice(&ys[j..]);
        Sample::from_sorted(out)
    }
}

/// Right-continuous Kaplan-Meier step function with Greenwood variances.
///
/// Values at index `j` hold on `[grid[j], grid[j + 1])`; before `grid[0]` the
/// survival is 1 with zero variance.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCurve {
    grid: Vec<f64>,
    surv: Vec<f64>,
    var: Vec<f64>,
    n_at_risk: Vec<usize>,
    n_events: Vec<usize>,
    max_time: f64,
    last_is_event: bool,
    absorbed: bool,
}

impl StepCurve {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn surv(&self) -> &[f64] {
        &self.surv
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }

    pub fn n_at_risk(&self) -> &[usize] {
        &self.n_at_risk
    }

    pub fn n_events(&self) -> &[usize] {
        &self.n_events
    }

    pub fn max_time(&self) -> f64 {
        self.max_time
    }

    pub fn last_is_event(&self) -> bool {
        self.last_is_event
    }

    /// True when the curve reached zero (every subject still at risk failed).
    /// The Greenwood variance is stored as 0 from that point on.
    pub fn absorbed(&self) -> bool {
        self.absorbed
    }

    /// Survival and variance at `t`, taking the post-jump value at grid times.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self.grid.partition_point(|&g| g <= t) {
            0 => (1.0, 0.0),
            k => (self.surv[k - 1], self.var[k - 1]),
        }
    }

    /// Upper end of the range on which the curve is defined: the last
    /// observation time, or unbounded once the curve has dropped to zero.
    pub fn defined_until(&self) -> f64 {
        if self.absorbed {
            f64::INFINITY
        } else {
            self.max_time
        }
    }
}

/// Product-limit estimate with Greenwood variance.
pub fn km_estimate(sample: &Sample) -> StepCurve {
    let obs = sample.observations();
    let mut curve = StepCurve {
        grid: Vec::new(),
        surv: Vec::new(),
        var: Vec::new(),
        n_at_risk: Vec::new(),
        n_events: Vec::new(),
        max_time: sample.last().time,
        last_is_event: sample.last().event,
        absorbed: false,
    };

    let mut at_risk = obs.len();
    let mut surv = 1.0;
    let mut greenwood = 0.0;
    let mut i = 0;
    while i < obs.len() {
        let t = obs[i].time;
        let mut events = 0;
        let mut j = i;
        while j < obs.len() && obs[j].time == t {
            if obs[j].event {
                events += 1;
            }
            j += 1;
        }
        if events > 0 {
            surv *= 1.0 - events as f64 / at_risk as f64;
            let var = if events < at_risk {
                greenwood += events as f64 / (at_risk as f64 * (at_risk - events) as f64);
                surv * surv * greenwood
            } else {
                // d_j = Y_j: the Greenwood sum is undefined, S = 0 from here on.
                surv = 0.0;
                curve.absorbed = true;
                0.0
            };
            curve.grid.push(t);
            curve.surv.push(surv);
            curve.var.push(var);
            curve.n_at_risk.push(at_risk);
            curve.n_events.push(events);
        }
        at_risk -= j - i;
        i = j;
    }
    curve
}

/// How `v` is chosen when exactly one sample ends with an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FollowUpRule {
    /// `max[t1 (1 - d1), t2 (1 - d2)]`: the censored sample's last time.
    #[default]
    Formula,
    /// The event-ended sample's last time.
    EventArm,
}

/// Last time at which the areas under both survival curves are computable.
///
/// Both last observations censored gives the smaller last time, both events
/// the larger; a mixed pair follows `rule`.
pub fn follow_up_end(sample1: &Sample, sample2: &Sample, rule: FollowUpRule) -> f64 {
    let (a, b) = (sample1.last(), sample2.last());
    match (a.event, b.event) {
        (false, false) => a.time.min(b.time),
        (true, true) => a.time.max(b.time),
        _ => {
            let keep = |o: Observation, want_event: bool| {
                if o.event == want_event {
                    o.time
                } else {
                    0.0
                }
            };
            let want_event = rule == FollowUpRule::EventArm;
            keep(a, want_event).max(keep(b, want_event))
        }
    }
}

/// Pooled distinct event times of two samples and their follow-up end.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledGrid {
    pub times: Vec<f64>,
    pub v: f64,
}

pub fn pooled_grid(sample1: &Sample, sample2: &Sample, rule: FollowUpRule) -> Result<PooledGrid> {
    let mut times: Vec<f64> = sample1
        .observations()
        .iter()
        .chain(sample2.observations())
        .filter(|o| o.event)
        .map(|o| o.time)
        .collect();
    if times.is_empty() {
        return Err(Error::NoEvents);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    Ok(PooledGrid {
        times,
        v: follow_up_end(sample1, sample2, rule),
    })
}

const MEDIAN_TOL: f64 = 1e-12;

/// Smallest grid time with survival at or below one half.
pub fn median_survival(curve: &StepCurve) -> Option<f64> {
    curve
        .surv
        .iter()
        .position(|&s| s <= 0.5 + MEDIAN_TOL)
        .map(|k| curve.grid[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(pairs: &[(f64, bool)]) -> Sample {
        Sample::from_pairs(pairs).unwrap()
    }

    fn uncensored(times: &[f64]) -> Sample {
        sample(&times.iter().map(|&t| (t, true)).collect::<Vec<_>>())
    }

    #[test]
    fn single_event_drops_to_zero() {
        let c = km_estimate(&sample(&[(2.0, true)]));
        assert_eq!(c.grid(), &[2.0]);
        assert_eq!(c.surv(), &[0.0]);
        assert_eq!(c.n_at_risk(), &[1]);
        assert_eq!(c.n_events(), &[1]);
        assert!(c.absorbed());
        assert_eq!(c.var(), &[0.0]);
    }

    #[test]
    fn three_events_hand_product_limit() {
        let c = km_estimate(&uncensored(&[1.0, 3.0, 5.0]));
        let want = [2.0 / 3.0, 1.0 / 3.0, 0.0];
        for (s, w) in c.surv().iter().zip(want) {
            assert!((s - w).abs() < 1e-15);
        }
        // Greenwood: S^2 * sum d/(Y(Y-d)) -> (4/9)(1/6), (1/9)(1/6 + 1/2)
        assert!((c.var()[0] - 4.0 / 54.0).abs() < 1e-15);
        assert!((c.var()[1] - (1.0 / 9.0) * (2.0 / 3.0)).abs() < 1e-15);
        assert_eq!(c.var()[2], 0.0);
    }

    #[test]
    fn all_censored_stays_at_one() {
        let c = km_estimate(&sample(&[(1.0, false), (2.0, false)]));
        assert!(c.grid().is_empty());
        assert_eq!(c.eval(0.0), (1.0, 0.0));
        assert_eq!(c.eval(2.0), (1.0, 0.0));
        assert_eq!(median_survival(&c), None);
    }

    #[test]
    fn eval_is_right_continuous() {
        let c = km_estimate(&uncensored(&[1.0, 3.0, 5.0]));
        assert_eq!(c.eval(0.5), (1.0, 0.0));
        let at3 = c.eval(3.0);
        assert!((at3.0 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(at3.1, c.var()[1]);
        assert_eq!(c.eval(4.0), at3);
    }

    #[test]
    fn ties_put_events_before_censorings() {
        let s = sample(&[(2.0, false), (2.0, true), (1.0, true)]);
        let order: Vec<bool> = s.observations().iter().map(|o| o.event).collect();
        assert_eq!(order, vec![true, true, false]);
        assert!(!s.last().event);
        let c = km_estimate(&s);
        // censored at 2 is still at risk at 2
        assert_eq!(c.n_at_risk(), &[3, 2]);
        assert!((c.surv()[1] - 2.0 / 3.0 * 0.5).abs() < 1e-15);
        assert!(!c.absorbed());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Sample::new(vec![]), Err(Error::EmptySample)));
        assert!(matches!(
            Sample::from_pairs(&[(-1.0, true)]),
            Err(Error::InvalidTime(_))
        ));
        assert!(Observation::new(f64::NAN, true).is_err());
    }

    #[test]
    fn follow_up_end_cases() {
        let ev5 = sample(&[(1.0, true), (5.0, true)]);
        let ev6 = sample(&[(1.0, true), (6.0, true)]);
        let ce5 = sample(&[(1.0, true), (5.0, false)]);
        let ce6 = sample(&[(1.0, true), (6.0, false)]);
        assert_eq!(follow_up_end(&ev5, &ev6, FollowUpRule::Formula), 6.0);
        assert_eq!(follow_up_end(&ce5, &ce6, FollowUpRule::Formula), 5.0);
        assert_eq!(follow_up_end(&ev5, &ce6, FollowUpRule::Formula), 6.0);
        assert_eq!(follow_up_end(&ce6, &ev5, FollowUpRule::Formula), 6.0);
        assert_eq!(follow_up_end(&ev5, &ce6, FollowUpRule::EventArm), 5.0);
    }

    #[test]
    fn pooled_grid_union_and_dedup() {
        let g = pooled_grid(
            &uncensored(&[1.0, 3.0, 5.0]),
            &uncensored(&[2.0, 4.0, 6.0]),
            FollowUpRule::Formula,
        )
        .unwrap();
        assert_eq!(g.times, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(g.v, 6.0);

        let g = pooled_grid(
            &uncensored(&[1.0, 2.0]),
            &uncensored(&[2.0, 3.0]),
            FollowUpRule::Formula,
        )
        .unwrap();
        assert_eq!(g.times, vec![1.0, 2.0, 3.0]);

        let none = sample(&[(1.0, false)]);
        assert!(matches!(
            pooled_grid(&none, &none, FollowUpRule::Formula),
            Err(Error::NoEvents)
        ));
    }

    #[test]
    fn median_examples() {
        let c = km_estimate(&uncensored(&[1.0, 3.0, 5.0]));
        assert_eq!(median_survival(&c), Some(3.0));
        let c = km_estimate(&sample(&[(2.0, true), (4.0, false)]));
        assert_eq!(c.surv(), &[0.5]);
        assert_eq!(median_survival(&c), Some(2.0));
    }

    #[test]
    fn pooled_merge_keeps_order() {
        let a = sample(&[(1.0, true), (2.0, false)]);
        let b = sample(&[(2.0, true), (0.5, false)]);
        let p = Sample::pooled(&a, &b);
        let times: Vec<(f64, bool)> = p.observations().iter().map(|o| (o.time, o.event)).collect();
        assert_eq!(
            times,
            vec![(0.5, false), (1.0, true), (2.0, true), (2.0, false)]
        );
    }
}
