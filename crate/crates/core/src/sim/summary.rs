//! Marginal means of study rejection rates.
//!
//! Each cell's response is the rejection rate (power) or the rejection rate in
//! percent minus the nominal 5 (type I deviation). Means are taken over a
//! balanced grid for each level of sample size, censoring target and
//! situation, and over the whole grid. These are plain cell means, not
//! coefficients of a fitted linear model.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::scenario::Situation;
use super::study::{CellResult, StudyResult, TestKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryMode {
    /// Null situations only; response `rate * 100 - 5`.
    Type1Deviation,
    /// Non-null situations only; response is the rate.
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    /// `NUM`, `CENSORE`, `SITUATION` or `TOTAL`.
    pub factor: String,
    pub level: String,
    /// One value per [`TestKind::ALL`] entry.
    pub values: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub mode: SummaryMode,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn get(&self, factor: &str, level: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.factor == factor && r.level == level)
    }

    pub fn render(&self) -> String {
        let title = match self.mode {
            SummaryMode::Type1Deviation => "Average deviations from the nominal 5 percent level",
            SummaryMode::Power => "Average rejection rates (power)",
        };
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = writeln!(
            out,
            "(balanced cell means over the simulated grid; not a fitted ANOVA model)"
        );
        let _ = writeln!(
            out,
            "{:<10}\t{:<10}\t{}",
            "FACTOR",
            "LEVEL",
            TestKind::ALL.map(|k| format!("{:>8}", k.label())).join("\t")
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<10}\t{:<10}\t{}",
                row.factor,
                row.level,
                row.values.map(|v| format!("{v:>8.3}")).join("\t")
            );
        }
        out
    }
}

fn size_label(n1: usize, n2: usize) -> String {
    format!("({n1}, {n2})")
}

fn response(cell: &CellResult, kind: TestKind, mode: SummaryMode) -> f64 {
    match mode {
        SummaryMode::Type1Deviation => cell.rate(kind) * 100.0 - 5.0,
        SummaryMode::Power => cell.rate(kind),
    }
}

fn mean_row<'a>(
    factor: &str,
    level: String,
    cells: impl Iterator<Item = &'a CellResult>,
    mode: SummaryMode,
) -> SummaryRow {
    let cells: Vec<&CellResult> = cells.collect();
    let n = cells.len() as f64;
    let values = TestKind::ALL.map(|k| cells.iter().map(|c| response(c, k, mode)).sum::<f64>() / n);
    SummaryRow {
        factor: factor.to_string(),
        level,
        values,
    }
}

pub fn summarize_study(result: &StudyResult, mode: SummaryMode) -> Result<SummaryTable> {
    let cells: Vec<&CellResult> = result
        .cells
        .iter()
        .filter(|c| match mode {
            SummaryMode::Type1Deviation => c.situation.is_null(),
            SummaryMode::Power => !c.situation.is_null(),
        })
        .collect();
    if cells.is_empty() {
        return Err(Error::IncompleteGrid(vec![match mode {
            SummaryMode::Type1Deviation => "any null-situation cell".into(),
            SummaryMode::Power => "any non-null-situation cell".into(),
        }]));
    }

    // censoring targets compared on a 1e-4 grid
    let censor_key = |c: f64| (c * 10_000.0).round() as i64;
    let situations: BTreeSet<Situation> = cells.iter().map(|c| c.situation).collect();
    let mut sizes: Vec<(usize, usize)> = Vec::new();
    for c in &cells {
        if !sizes.contains(&(c.n1, c.n2)) {
            sizes.push((c.n1, c.n2));
        }
    }
    let censors: BTreeSet<i64> = cells.iter().map(|c| censor_key(c.censor_target)).collect();

    let mut missing = Vec::new();
    for &s in &situations {
        for &(n1, n2) in &sizes {
            for &cr in &censors {
                let count = cells
                    .iter()
                    .filter(|c| {
                        c.situation == s
                            && (c.n1, c.n2) == (n1, n2)
                            && censor_key(c.censor_target) == cr
                    })
                    .count();
                if count != 1 {
                    missing.push(format!(
                        "{s} {n1}/{n2} CR={:.2}{}",
                        cr as f64 / 10_000.0,
                        if count > 1 { " (duplicated)" } else { "" }
                    ));
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteGrid(missing));
    }

    let mut rows = Vec::new();
    for &(n1, n2) in &sizes {
        rows.push(mean_row(
            "NUM",
            size_label(n1, n2),
            cells.iter().copied().filter(|c| (c.n1, c.n2) == (n1, n2)),
            mode,
        ));
    }
    for &cr in &censors {
        rows.push(mean_row(
            "CENSORE",
            format!("{:.2}", cr as f64 / 10_000.0),
            cells
                .iter()
                .copied()
                .filter(|c| censor_key(c.censor_target) == cr),
            mode,
        ));
    }
    for &s in &situations {
        rows.push(mean_row(
            "SITUATION",
            s.to_string(),
            cells.iter().copied().filter(|c| c.situation == s),
            mode,
        ));
    }
    rows.push(mean_row("TOTAL", "all".into(), cells.iter().copied(), mode));
    Ok(SummaryTable { mode, rows })
}
