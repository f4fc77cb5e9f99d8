//! Two-sample analysis report: descriptives plus one row per effect measure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use crate::abs::{
    abs_confidence_interval, abs_statistic, permutation_test, AbsOptions, IntervalSpec,
    PermutationOptions,
};
use crate::compare::{hazard_ratio, logrank_test, rmst_difference_test};
use crate::error::{Error, Result};
use crate::surv::{km_estimate, median_survival, pooled_grid, Sample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub n: usize,
    pub events: usize,
    pub censored: usize,
    pub censor_rate: f64,
    /// `None` when the curve never reaches 0.5.
    pub median: Option<f64>,
}

impl GroupSummary {
    pub fn of(label: &str, sample: &Sample) -> Self {
        Self {
            label: label.to_string(),
            n: sample.len(),
            events: sample.n_events(),
            censored: sample.n_censored(),
            censor_rate: sample.n_censored() as f64 / sample.len() as f64,
            median: median_survival(&km_estimate(sample)),
        }
    }
}

/// One measure of the treatment effect. Missing fields render as `/`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub measure: String,
    pub estimate: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub p_value: Option<f64>,
    /// Resample count behind a permutation P value.
    pub resamples: Option<usize>,
    /// Footnote letter naming the test behind the P value.
    pub tag: Option<String>,
    pub start: Option<f64>,
    pub end: Option<f64>,
    /// Why the measure could not be computed.
    pub failure: Option<String>,
}

impl MeasureRow {
    fn named(measure: &str) -> Self {
        Self {
            measure: measure.to_string(),
            ..Default::default()
        }
    }

    fn failed(measure: &str, reason: impl ToString) -> Self {
        Self {
            failure: Some(reason.to_string()),
            ..Self::named(measure)
        }
    }

    fn with_ci(mut self, ci: Option<(f64, f64)>) -> Self {
        if let Some((lo, hi)) = ci {
            self.ci_lo = Some(lo);
            self.ci_hi = Some(hi);
        }
        self
    }

    pub fn ci(&self) -> Option<(f64, f64)> {
        Some((self.ci_lo?, self.ci_hi?))
    }

    /// P value as printed: three decimals, a zero permutation P as `< 1/n`.
    pub fn p_display(&self) -> String {
        match (self.p_value, self.resamples) {
            (None, _) => "/".into(),
            (Some(0.0), Some(n)) => format!("< 1/{n}"),
            (Some(p), _) if p > 0.0 && p < 0.0005 => "< 0.001".into(),
            (Some(p), _) => format!("{p:.3}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub groups: [GroupSummary; 2],
    pub rows: Vec<MeasureRow>,
    pub level: f64,
    /// Secondary numbers shown below the table, e.g. `follow_up_end`.
    pub extras: BTreeMap<String, f64>,
}

/// Plot data: both step curves evaluated at 0 and at every observed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    pub absdiff: f64,
}

pub fn curve_points(sample1: &Sample, sample2: &Sample) -> Vec<CurvePoint> {
    let (c1, c2) = (km_estimate(sample1), km_estimate(sample2));
    let mut times: Vec<f64> = std::iter::once(0.0)
        .chain(
            sample1
                .observations()
                .iter()
                .chain(sample2.observations())
                .map(|o| o.time),
        )
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .into_iter()
        .map(|t| {
            let (s1, s2) = (c1.eval(t).0, c2.eval(t).0);
            CurvePoint {
                t,
                s1,
                s2,
                absdiff: (s1 - s2).abs(),
            }
        })
        .collect()
}

fn permutation_row(
    measure: &str,
    tag: &str,
    s1: &Sample,
    s2: &Sample,
    abs: AbsOptions,
    config: &AnalysisConfig,
) -> MeasureRow {
    let opts = PermutationOptions {
        n_resamples: config.n_resamples,
        seed: config.seed,
        abs,
        ..Default::default()
    };
    let stat = match abs_statistic(s1, s2, &abs) {
        Ok(r) => r,
        Err(e) => return MeasureRow::failed(measure, e),
    };
    let mut row = MeasureRow {
        estimate: Some(stat.abs_value),
        start: Some(stat.start),
        end: Some(stat.end),
        ..MeasureRow::named(measure)
    };
    match permutation_test(s1, s2, &opts) {
        Ok(p) => {
            row.p_value = Some(p.p_value);
            row.resamples = Some(p.n_resamples);
            row.tag = Some(tag.into());
        }
        Err(e) => row.failure = Some(format!("permutation test: {e}")),
    }
    row
}

/// Runs every measure on two samples. A measure that cannot be computed is
/// kept as a row with its failure reason; only an invalid split aborts.
pub fn analyze_samples(
    labels: [&str; 2],
    sample1: &Sample,
    sample2: &Sample,
    config: &AnalysisConfig,
) -> Result<AnalysisReport> {
    let base = AbsOptions {
        interval: IntervalSpec::full().with_mode(config.interval_mode),
        rho: config.rho,
        follow_up: config.follow_up,
    };
    let groups = [
        GroupSummary::of(labels[0], sample1),
        GroupSummary::of(labels[1], sample2),
    ];
    let mut extras = BTreeMap::new();
    let v = pooled_grid(sample1, sample2, config.follow_up).map(|g| g.v);
    if let Ok(v) = v {
        extras.insert("follow_up_end".to_string(), v);
    }
    if let Some(split) = config.split {
        if let Ok(v) = v {
            if !(split > 0.0 && split < v) {
                return Err(Error::Config(format!(
                    "split {split} must lie strictly inside (0, {v})"
                )));
            }
        }
    }

    let mut rows = Vec::new();

    rows.push(match hazard_ratio(sample1, sample2, config.level, config.ties) {
        Ok(hr) => {
            if let Some(p) = hr.extra("score_p") {
                extras.insert("hr_score_p".into(), p);
            }
            extras.insert("hr_wald_p".into(), hr.p_value);
            MeasureRow {
                estimate: hr.estimate,
                p_value: hr.extra("score_p"),
                tag: Some("a".into()),
                ..MeasureRow::named("HR")
            }
            .with_ci(hr.ci_lo.zip(hr.ci_hi))
        }
        Err(e) => MeasureRow::failed("HR", e),
    });
    if let Ok(lr) = logrank_test(sample1, sample2) {
        extras.insert("mantel_logrank_p".into(), lr.p_value);
    }

    rows.push(match (groups[0].median, groups[1].median) {
        (Some(m1), Some(m2)) => MeasureRow {
            estimate: Some(m1 - m2),
            ..MeasureRow::named("MTd")
        },
        _ => {
            let missing: Vec<String> = groups
                .iter()
                .filter(|g| g.median.is_none())
                .map(|g| format!("{:?}", g.label))
                .collect();
            MeasureRow::failed(
                "MTd",
                format!(
                    "survival in group {} did not reach 0.5",
                    missing.join(" and ")
                ),
            )
        }
    });

    rows.push(
        match rmst_difference_test(sample1, sample2, config.tau, config.level, config.follow_up) {
            Ok(t) => MeasureRow {
                estimate: t.estimate,
                p_value: Some(t.p_value),
                end: t.extra("tau"),
                start: Some(0.0),
                ..MeasureRow::named("RMSTd")
            }
            .with_ci(t.ci_lo.zip(t.ci_hi)),
            Err(e) => MeasureRow::failed("RMSTd", e),
        },
    );

    let mut abs_row = permutation_row("ABS", "b", sample1, sample2, base, config);
    if abs_row.estimate.is_some() && config.n_boot > 0 {
        match abs_confidence_interval(sample1, sample2, &base, config.level, config.n_boot, config.seed) {
            Ok(ci) => abs_row = abs_row.with_ci(Some(ci)),
            Err(e) => {
                abs_row.failure.get_or_insert_with(|| format!("bootstrap interval: {e}"));
            }
        }
    }
    rows.push(abs_row);

    if let Some(split) = config.split {
        let left = base.with_interval(IntervalSpec::new(0.0, Some(split), config.interval_mode));
        let right = base.with_interval(IntervalSpec::new(split, None, config.interval_mode));
        rows.push(permutation_row("ABSi_L", "c", sample1, sample2, left, config));
        rows.push(permutation_row("ABSi_R", "c", sample1, sample2, right, config));
    }

    Ok(AnalysisReport {
        groups,
        rows,
        level: config.level,
        extras,
    })
}

fn fmt3(x: Option<f64>) -> String {
    x.map_or_else(|| "/".into(), |v| format!("{v:.3}"))
}

fn trim_num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

impl AnalysisReport {
    pub fn row(&self, measure: &str) -> Option<&MeasureRow> {
        self.rows.iter().find(|r| r.measure == measure)
    }

    /// Plain-text table.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Descriptive statistics");
        let _ = writeln!(
            out,
            "{:<12} {:>5} {:>7} {:>9} {:>12} {:>8}",
            "Group", "N", "Events", "Censored", "Censor rate", "Median"
        );
        for g in &self.groups {
            let _ = writeln!(
                out,
                "{:<12} {:>5} {:>7} {:>9} {:>12.3} {:>8}",
                g.label,
                g.n,
                g.events,
                g.censored,
                g.censor_rate,
                fmt3(g.median)
            );
        }
        if let Some(v) = self.extras.get("follow_up_end") {
            let _ = writeln!(out, "Follow-up end v = {v:.3}");
        }
        let _ = writeln!(out);
        let pct = trim_num(self.level * 100.0);
        let _ = writeln!(
            out,
            "Measure of effect ({} vs {})",
            self.groups[0].label, self.groups[1].label
        );
        let _ = writeln!(out, "{:<8} {:<30} P", "Measure", format!("Statistic ({pct}% CI)"));
        let mut failures = Vec::new();
        for row in &self.rows {
            let mut stat = match row.estimate {
                None => "/".to_string(),
                Some(e) => match row.ci() {
                    Some((lo, hi)) => format!("{e:.3} ({lo:.3}, {hi:.3})"),
                    None => format!("{e:.3}"),
                },
            };
            if let Some(reason) = &row.failure {
                failures.push(format!("{}: {reason}", row.measure));
                let _ = write!(stat, " [{}]", failures.len());
            }
            let mut p = row.p_display();
            if let Some(tag) = &row.tag {
                let _ = write!(p, " ^{tag}");
            }
            let _ = writeln!(out, "{:<8} {:<30} {}", row.measure, stat, p);
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{pct}% CI: {pct}% confidence interval; ^a: log-rank (Cox score) test; ^b: ABSP test; ^c: ABSPi test"
        );
        let intervals: Vec<String> = self
            .rows
            .iter()
            .filter(|r| r.measure.starts_with("ABSi"))
            .filter_map(|r| Some(format!("[{}, {}]", trim_num(r.start?), trim_num(r.end?))))
            .collect();
        if intervals.len() == 2 {
            let _ = writeln!(
                out,
                "ABSi_L/ABSi_R: ABS over the left/right interval, {} and {}",
                intervals[0], intervals[1]
            );
        }
        if let Some(p) = self.extras.get("mantel_logrank_p") {
            let _ = writeln!(out, "Mantel log-rank P = {p:.3}");
        }
        if let Some(p) = self.extras.get("hr_wald_p") {
            let _ = writeln!(out, "HR Wald P = {p:.3}");
        }
        for (i, f) in failures.iter().enumerate() {
            let _ = writeln!(out, "[{}] {f}", i + 1);
        }
        out
    }

    /// Machine-readable twin of [`render_text`](Self::render_text); full
    /// precision, re-parsed by [`read_csv`](Self::read_csv).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (i, g) in self.groups.iter().enumerate() {
            w.serialize(CsvRow {
                kind: format!("group{}", i + 1),
                name: g.label.clone(),
                n: Some(g.n),
                events: Some(g.events),
                censored: Some(g.censored),
                censor_rate: Some(g.censor_rate),
                median: g.median,
                ..Default::default()
            })?;
        }
        for r in &self.rows {
            w.serialize(CsvRow {
                kind: "measure".into(),
                name: r.measure.clone(),
                estimate: r.estimate,
                ci_lo: r.ci_lo,
                ci_hi: r.ci_hi,
                p_value: r.p_value,
                p_display: Some(r.p_display()),
                resamples: r.resamples,
                tag: r.tag.clone(),
                start: r.start,
                end: r.end,
                failure: r.failure.clone(),
                ..Default::default()
            })?;
        }
        w.serialize(CsvRow {
            kind: "extra".into(),
            name: "level".into(),
            estimate: Some(self.level),
            ..Default::default()
        })?;
        for (k, v) in &self.extras {
            w.serialize(CsvRow {
                kind: "extra".into(),
                name: k.clone(),
                estimate: Some(*v),
                ..Default::default()
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut groups: [Option<GroupSummary>; 2] = [None, None];
        let mut rows = Vec::new();
        let mut extras = BTreeMap::new();
        let mut level = None;
        for rec in csv::Reader::from_reader(reader).deserialize::<CsvRow>() {
            let r = rec?;
            let need = |x: Option<usize>, what: &str| {
                x.ok_or_else(|| Error::Input(format!("report row {:?} lacks {what}", r.name)))
            };
            match r.kind.as_str() {
                "group1" | "group2" => {
                    let i = if r.kind == "group1" { 0 } else { 1 };
                    groups[i] = Some(GroupSummary {
                        label: r.name.clone(),
                        n: need(r.n, "n")?,
                        events: need(r.events, "events")?,
                        censored: need(r.censored, "censored")?,
                        censor_rate: r.censor_rate.unwrap_or(f64::NAN),
                        median: r.median,
                    });
                }
                "measure" => rows.push(MeasureRow {
                    measure: r.name,
                    estimate: r.estimate,
                    ci_lo: r.ci_lo,
                    ci_hi: r.ci_hi,
                    p_value: r.p_value,
                    resamples: r.resamples,
                    tag: r.tag,
                    start: r.start,
                    end: r.end,
                    failure: r.failure,
                }),
                "extra" if r.name == "level" => level = r.estimate,
                "extra" => {
                    if let Some(v) = r.estimate {
                        extras.insert(r.name, v);
                    }
                }
                other => return Err(Error::Input(format!("unknown report row kind {other:?}"))),
            }
        }
        let [g1, g2] = groups;
        match (g1, g2, level) {
            (Some(g1), Some(g2), Some(level)) => Ok(Self {
                groups: [g1, g2],
                rows,
                level,
                extras,
            }),
            _ => Err(Error::Input("report file lacks group or level rows".into())),
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CsvRow {
    kind: String,
    name: String,
    n: Option<usize>,
    events: Option<usize>,
    censored: Option<usize>,
    censor_rate: Option<f64>,
    median: Option<f64>,
    estimate: Option<f64>,
    ci_lo: Option<f64>,
    ci_hi: Option<f64>,
    p_value: Option<f64>,
    p_display: Option<String>,
    resamples: Option<usize>,
    tag: Option<String>,
    start: Option<f64>,
    end: Option<f64>,
    failure: Option<String>,
}
