//! Comparator analyses: log-rank test, two-group Cox hazard ratio and the
//! restricted mean survival time difference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{chi2_1df_sf, normal_critical, normal_two_sided_p, TestResult};
use crate::surv::{follow_up_end, km_estimate, FollowUpRule, Sample, StepCurve};

// ── Risk sets ───────────────────────────────────────────────────────────────

/// Numbers at risk and events of each group at one pooled event time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskRow {
    pub time: f64,
    pub at_risk1: usize,
    pub at_risk2: usize,
    pub events1: usize,
    pub events2: usize,
}

impl RiskRow {
    pub fn at_risk(&self) -> usize {
        self.at_risk1 + self.at_risk2
    }

    pub fn events(&self) -> usize {
        self.events1 + self.events2
    }
}

/// Risk table over the pooled distinct event times.
pub fn risk_table(sample1: &Sample, sample2: &Sample) -> Vec<RiskRow> {
    let (a, b) = (sample1.observations(), sample2.observations());
    let mut times: Vec<f64> = a
        .iter()
        .chain(b)
        .filter(|o| o.event)
        .map(|o| o.time)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();

    let (mut i, mut j) = (0, 0);
    times
        .into_iter()
        .map(|t| {
            while i < a.len() && a[i].time < t {
                i += 1;
            }
            while j < b.len() && b[j].time < t {
                j += 1;
            }
            let events = |obs: &[crate::surv::Observation], from: usize| {
                obs[from..]
                    .iter()
                    .take_while(|o| o.time == t)
                    .filter(|o| o.event)
                    .count()
            };
            RiskRow {
                time: t,
                at_risk1: a.len() - i,
                at_risk2: b.len() - j,
                events1: events(a, i),
                events2: events(b, j),
            }
        })
        .collect()
}

// ── Log-rank ────────────────────────────────────────────────────────────────

/// Mantel log-rank test with the hypergeometric variance.
///
/// Extras: `observed` and `expected` group-1 events, `variance`.
pub fn logrank_test(sample1: &Sample, sample2: &Sample) -> Result<TestResult> {
    let rows = risk_table(sample1, sample2);
    if rows.is_empty() {
        return Err(Error::NoEvents);
    }
    let (mut observed, mut expected, mut variance) = (0.0, 0.0, 0.0);
    for r in &rows {
        let y = r.at_risk() as f64;
        if r.at_risk() <= 1 {
            continue;
        }
        let d = r.events() as f64;
        let y1 = r.at_risk1 as f64;
        let y2 = r.at_risk2 as f64;
        observed += r.events1 as f64;
        expected += y1 * d / y;
        variance += y1 * y2 * d * (y - d) / (y * y * (y - 1.0));
    }
    if !(variance > 0.0) {
        return Err(Error::DegenerateLogrank);
    }
    let stat = (observed - expected).powi(2) / variance;
    Ok(TestResult::new("logrank", stat, chi2_1df_sf(stat))
        .with_extra("observed", observed)
        .with_extra("expected", expected)
        .with_extra("variance", variance))
}

// ── Cox model with one binary covariate ─────────────────────────────────────

/// Handling of tied event times in the partial likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ties {
    #[default]
    Efron,
    Breslow,
}

const COX_MAX_ITER: usize = 50;
const COX_TOL: f64 = 1e-10;
const COX_MAX_BETA: f64 = 30.0;

/// Log partial likelihood, score and information at `beta`, with the
/// covariate equal to 1 for group 1 and 0 for group 2.
fn cox_terms(rows: &[RiskRow], beta: f64, ties: Ties) -> (f64, f64, f64) {
    let r = beta.exp();
    let (mut loglik, mut score, mut info) = (0.0, 0.0, 0.0);
    for row in rows {
        let d = row.events();
        let s0 = row.at_risk1 as f64 * r + row.at_risk2 as f64;
        let s1 = row.at_risk1 as f64 * r;
        let d0 = row.events1 as f64 * r + row.events2 as f64;
        let d1 = row.events1 as f64 * r;
        loglik += beta * row.events1 as f64;
        score += row.events1 as f64;
        for k in 0..d {
            let f = match ties {
                Ties::Efron => k as f64 / d as f64,
                Ties::Breslow => 0.0,
            };
            let a0 = s0 - f * d0;
            let mean = (s1 - f * d1) / a0;
            loglik -= a0.ln();
            score -= mean;
            // x is binary, so E[x^2] = E[x]
            info += mean - mean * mean;
        }
    }
    (loglik, score, info)
}

/// Score ("log-rank") test of the Cox model at `beta = 0`.
pub fn cox_score_test(sample1: &Sample, sample2: &Sample, ties: Ties) -> Result<TestResult> {
    let rows = risk_table(sample1, sample2);
    if rows.is_empty() {
        return Err(Error::NoEvents);
    }
    let (_, u, i) = cox_terms(&rows, 0.0, ties);
    if !(i > 0.0) {
        return Err(Error::DegenerateLogrank);
    }
    let stat = u * u / i;
    Ok(TestResult::new("cox_score", stat, chi2_1df_sf(stat)).with_extra("information", i))
}

/// Hazard ratio of group 1 relative to group 2 from a Cox model with one
/// binary covariate, fitted by Newton-Raphson with step halving.
///
/// The result carries the Wald statistic and P value; extras hold `beta`,
/// `se`, `iterations`, and the score and likelihood-ratio tests
/// (`score_statistic`, `score_p`, `lrt_statistic`, `lrt_p`).
pub fn hazard_ratio(sample1: &Sample, sample2: &Sample, level: f64, ties: Ties) -> Result<TestResult> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let rows = risk_table(sample1, sample2);
    let events1: usize = rows.iter().map(|r| r.events1).sum();
    let events2: usize = rows.iter().map(|r| r.events2).sum();
    if events1 + events2 == 0 {
        return Err(Error::NoEvents);
    }
    if events1 == 0 || events2 == 0 {
        return Err(Error::HrDiverges(
            "all events fall in one group (monotone likelihood)".into(),
        ));
    }

    let (loglik0, score0, info0) = cox_terms(&rows, 0.0, ties);
    let (mut beta, mut loglik, mut score, mut info) = (0.0, loglik0, score0, info0);
    let mut iterations = 0;
    while score.abs() >= COX_TOL && iterations < COX_MAX_ITER {
        if !(info > 0.0) {
            return Err(Error::HrDiverges("zero information".into()));
        }
        iterations += 1;
        let mut step = score / info;
        let mut next = cox_terms(&rows, beta + step, ties);
        let mut halvings = 0;
        // slack absorbs rounding in the log-likelihood near the optimum
        let floor = loglik - 1e-12 * (1.0 + loglik.abs());
        while next.0 < floor && halvings < 30 {
            step *= 0.5;
            next = cox_terms(&rows, beta + step, ties);
            halvings += 1;
        }
        beta += step;
        (loglik, score, info) = next;
        if beta.abs() > COX_MAX_BETA {
            return Err(Error::HrDiverges(format!("|beta| exceeded {COX_MAX_BETA}")));
        }
    }
    if !(info > 0.0) {
        return Err(Error::HrDiverges("zero information at the estimate".into()));
    }
    if score.abs() > 1e-6 * (1.0 + info) {
        return Err(Error::HrDiverges(format!(
            "no convergence after {COX_MAX_ITER} Newton steps"
        )));
    }

    let se = info.sqrt().recip();
    let z = beta / se;
    let crit = normal_critical(level);
    let score_stat = score0 * score0 / info0;
    let lrt_stat = (2.0 * (loglik - loglik0)).max(0.0);
    Ok(TestResult::new("hazard_ratio", z, normal_two_sided_p(z))
        .with_estimate(
            beta.exp(),
            Some(((beta - crit * se).exp(), (beta + crit * se).exp())),
        )
        .with_extra("beta", beta)
        .with_extra("se", se)
        .with_extra("iterations", iterations as f64)
        .with_extra("score_statistic", score_stat)
        .with_extra("score_p", chi2_1df_sf(score_stat))
        .with_extra("lrt_statistic", lrt_stat)
        .with_extra("lrt_p", chi2_1df_sf(lrt_stat)))
}

// ── Restricted mean survival time ───────────────────────────────────────────

/// Area under the curve on `[0, tau]` and its Greenwood-type variance
/// `Σ A_j² d_j / (Y_j (Y_j - d_j))` with `A_j = ∫_{t_j}^{tau} S(t) dt`.
pub fn rmst(curve: &StepCurve, tau: f64) -> Result<(f64, f64)> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tau must be finite and nonnegative, got {tau}"
        )));
    }
    if tau > curve.defined_until() {
        return Err(Error::TauBeyondFollowUp {
            tau,
            last: curve.max_time(),
        });
    }
    let inside = curve.grid().partition_point(|&t| t < tau);
    // piece k spans [left_k, left_{k+1}) with left_0 = 0 and left_k = grid[k-1]
    let mut lefts = Vec::with_capacity(inside + 1);
    lefts.push(0.0);
    lefts.extend_from_slice(&curve.grid()[..inside]);
    let pieces: Vec<f64> = lefts
        .iter()
        .enumerate()
        .map(|(k, &left)| {
            let right = lefts.get(k + 1).copied().unwrap_or(tau);
            curve.eval(left).0 * (right - left)
        })
        .collect();

    let estimate: f64 = pieces.iter().sum();
    let mut tail = 0.0;
    let mut variance = 0.0;
    for j in (0..inside).rev() {
        tail += pieces[j + 1];
        let y = curve.n_at_risk()[j];
        let d = curve.n_events()[j];
        if y > d {
            variance += tail * tail * d as f64 / (y as f64 * (y - d) as f64);
        }
    }
    Ok((estimate, variance))
}

/// RMST of group 1 minus RMST of group 2, with a normal-theory test.
/// `tau` defaults to the follow-up end `v` of the two samples.
pub fn rmst_difference_test(
    sample1: &Sample,
    sample2: &Sample,
    tau: Option<f64>,
    level: f64,
    rule: FollowUpRule,
) -> Result<TestResult> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let tau = tau.unwrap_or_else(|| follow_up_end(sample1, sample2, rule));
    let (r1, v1) = rmst(&km_estimate(sample1), tau)?;
    let (r2, v2) = rmst(&km_estimate(sample2), tau)?;
    let diff = r1 - r2;
    let se = (v1 + v2).sqrt();
    let z = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        return Err(Error::DegenerateVariance);
    };
    let crit = normal_critical(level);
    Ok(TestResult::new("rmst_difference", z, normal_two_sided_p(z))
        .with_estimate(diff, Some((diff - crit * se, diff + crit * se)))
        .with_extra("tau", tau)
        .with_extra("rmst1", r1)
        .with_extra("rmst2", r2)
        .with_extra("se", se))
}
