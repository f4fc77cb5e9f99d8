use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{DatasetGenerator, ScenarioSpec, Situation};
use crate::abs::{abs_normal_test, permutation_test, AbsOptions, PermutationOptions};
use crate::compare::{logrank_test, rmst_difference_test};
use crate::error::{Error, Result};
use crate::rng;
use crate::surv::{FollowUpRule, Sample};

/// The four tests compared in a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestKind {
    Logrank,
    Rmstd,
    AbsNormal,
    Absp,
}

impl TestKind {
    pub const ALL: [TestKind; 4] = [
        TestKind::Logrank,
        TestKind::Rmstd,
        TestKind::AbsNormal,
        TestKind::Absp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Logrank => "logrank",
            TestKind::Rmstd => "rmstd",
            TestKind::AbsNormal => "abs_normal",
            TestKind::Absp => "absp",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TestKind::Logrank => "Log-rank",
            TestKind::Rmstd => "RMSTd",
            TestKind::AbsNormal => "ABS",
            TestKind::Absp => "ABSP",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Input(format!("unknown test name {s:?}")))
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestTally {
    pub rejections: usize,
    /// Datasets on which the test could not be computed (scored as non-rejection).
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub situation: Situation,
    pub n1: usize,
    pub n2: usize,
    pub censor_target: f64,
    pub iterations: usize,
    pub tallies: [TestTally; 4],
    /// Mean observed censoring fraction over all datasets of the cell.
    pub mean_censoring: f64,
    pub seed: u64,
}

impl CellResult {
    pub fn tally(&self, kind: TestKind) -> TestTally {
        self.tallies[kind.slot()]
    }

    pub fn rate(&self, kind: TestKind) -> f64 {
        self.tally(kind).rejections as f64 / self.iterations as f64
    }

    pub fn label(&self) -> String {
        format!(
            "{} {}/{} CR={:.2}",
            self.situation, self.n1, self.n2, self.censor_target
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub cells: Vec<CellResult>,
    pub seed: u64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Outcome {
    rejected: [bool; 4],
    degenerate: [bool; 4],
    censored: usize,
    total: usize,
}

impl Outcome {
    fn record(&mut self, kind: TestKind, p: Result<f64>, alpha: f64) {
        match p {
            Ok(p) => self.rejected[kind.slot()] = p < alpha,
            Err(_) => self.degenerate[kind.slot()] = true,
        }
    }
}

/// Key of a cell's random streams; depends on the cell's identity, not on
/// its position in the grid.
fn cell_key(seed: u64, spec: &ScenarioSpec) -> u64 {
    rng::derive_key(
        seed,
        &[
            spec.situation.index(),
            spec.n1 as u64,
            spec.n2 as u64,
            (spec.censor_target * 10_000.0).round() as u64,
        ],
    )
}

fn run_iteration(
    spec: &ScenarioSpec,
    generator: &DatasetGenerator,
    key: u64,
    iteration: usize,
) -> Outcome {
    let mut rng = rng::stream(key, iteration as u64);
    let (a, b) = generator.generate(&mut rng);
    let perm_seed: u64 = rng.random();
    evaluate(&a, &b, spec, perm_seed)
}

fn evaluate(a: &Sample, b: &Sample, spec: &ScenarioSpec, perm_seed: u64) -> Outcome {
    let alpha = spec.alpha;
    let options = AbsOptions::default();
    let mut out = Outcome {
        censored: a.n_censored() + b.n_censored(),
        total: a.len() + b.len(),
        ..Default::default()
    };
    out.record(TestKind::Logrank, logrank_test(a, b).map(|t| t.p_value), alpha);
    out.record(
        TestKind::Rmstd,
        rmst_difference_test(a, b, None, 0.95, FollowUpRule::Formula).map(|t| t.p_value),
        alpha,
    );
    out.record(
        TestKind::AbsNormal,
        abs_normal_test(a, b, &options).map(|t| t.p_value),
        alpha,
    );
    let perm = PermutationOptions {
        n_resamples: spec.permutations,
        seed: perm_seed,
        abs: options,
        ..Default::default()
    };
    out.record(
        TestKind::Absp,
        permutation_test(a, b, &perm).map(|r| r.p_value),
        alpha,
    );
    out
}

/// Runs every iteration of one cell.
pub fn run_cell(spec: &ScenarioSpec, seed: u64) -> Result<CellResult> {
    let generator = DatasetGenerator::new(spec)?;
    let key = cell_key(seed, spec);
    let outcomes: Vec<Outcome> = (0..spec.iterations)
        .into_par_iter()
        .map(|i| run_iteration(spec, &generator, key, i))
        .collect();

    let mut tallies = [TestTally::default(); 4];
    let (mut censored, mut total) = (0usize, 0usize);
    for o in &outcomes {
        for (k, t) in tallies.iter_mut().enumerate() {
            t.rejections += o.rejected[k] as usize;
            t.degenerate += o.degenerate[k] as usize;
        }
        censored += o.censored;
        total += o.total;
    }
    Ok(CellResult {
        situation: spec.situation,
        n1: spec.n1,
        n2: spec.n2,
        censor_target: spec.censor_target,
        iterations: spec.iterations,
        tallies,
        mean_censoring: censored as f64 / total as f64,
        seed,
    })
}

/// Runs every cell of `grid`. Cells and iterations draw from streams keyed
/// by `(seed, cell identity, iteration)`, so any cell can be rerun alone.
pub fn run_study(grid: &[ScenarioSpec], seed: u64) -> Result<StudyResult> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("study grid is empty".into()));
    }
    let cells = grid
        .iter()
        .map(|spec| run_cell(spec, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(StudyResult { cells, seed })
}

#[derive(Debug, Serialize, Deserialize)]
struct StudyRow {
    scenario: String,
    n1: usize,
    n2: usize,
    censor_target: f64,
    test: String,
    rejections: usize,
    iterations: usize,
    rate: f64,
    degenerate_count: usize,
    seed: u64,
}

impl StudyResult {
    /// One row per (cell, test).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for cell in &self.cells {
            for kind in TestKind::ALL {
                let t = cell.tally(kind);
                w.serialize(StudyRow {
                    scenario: cell.situation.to_string(),
                    n1: cell.n1,
                    n2: cell.n2,
                    censor_target: cell.censor_target,
                    test: kind.name().to_string(),
                    rejections: t.rejections,
                    iterations: cell.iterations,
                    rate: cell.rate(kind),
                    degenerate_count: t.degenerate,
                    seed: cell.seed,
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format written by [`write_csv`](Self::write_csv). Achieved
    /// censoring is not part of the file and reads back as NaN.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut cells: Vec<CellResult> = Vec::new();
        let mut seed = None;
        for row in csv::Reader::from_reader(reader).deserialize::<StudyRow>() {
            let row = row?;
            let situation: Situation = row.scenario.parse()?;
            let kind = TestKind::parse(&row.test)?;
            seed.get_or_insert(row.seed);
            let idx = cells.iter().position(|c| {
                c.situation == situation
                    && c.n1 == row.n1
                    && c.n2 == row.n2
                    && c.censor_target == row.censor_target
            });
            let cell = match idx {
                Some(i) => &mut cells[i],
                None => {
                    cells.push(CellResult {
                        situation,
                        n1: row.n1,
                        n2: row.n2,
                        censor_target: row.censor_target,
                        iterations: row.iterations,
                        tallies: [TestTally::default(); 4],
                        mean_censoring: f64::NAN,
                        seed: row.seed,
                    });
                    cells.last_mut().expect("just pushed")
                }
            };
            if cell.iterations != row.iterations {
                return Err(Error::Input(format!(
                    "cell {} has inconsistent iteration counts",
                    cell.label()
                )));
            }
            cell.tallies[kind.slot()] = TestTally {
                rejections: row.rejections,
                degenerate: row.degenerate_count,
            };
        }
        Ok(StudyResult {
            cells,
            seed: seed.unwrap_or(0),
        })
    }

    /// Rejection-rate table of one situation in the layout
    /// `N1 N2 Censore Log-rank RMSTd ABS ABSP`.
    pub fn render_situation(&self, situation: Situation) -> String {
        let mut out = format!(
            "Situation {situation}\nN1\tN2\tCensore\t{}\n",
            TestKind::ALL.map(|k| k.label()).join("\t")
        );
        for cell in self.cells.iter().filter(|c| c.situation == situation) {
            out.push_str(&format!(
                "{}\t{}\t{:.2}\t{}\n",
                cell.n1,
                cell.n2,
                cell.censor_target,
                TestKind::ALL.map(|k| format!("{:.3}", cell.rate(k))).join("\t")
            ));
        }
        out
    }
}
