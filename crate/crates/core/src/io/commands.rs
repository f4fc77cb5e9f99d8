use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{AnalysisConfig, DiagnoseConfig, SimulateConfig};
use super::ingest::{ingest_csv, IngestSummary};
use super::report::{analyze_samples, curve_points, AnalysisReport, CurvePoint};
use crate::abs::{null_delta_diagnostic, AbsOptions, NullDiagnostic};
use crate::error::{Error, Result};
use crate::sim::{
    run_study, study_grid, summarize_study, ScenarioSpec, Situation, StudyResult, SummaryMode,
};
use crate::stats::histogram;

#[derive(Debug, Clone)]
pub struct AnalyzeOutput {
    pub report: AnalysisReport,
    pub curves: Vec<CurvePoint>,
    pub ingest: IngestSummary,
    pub files: Vec<PathBuf>,
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok((path, BufWriter::new(file)))
}

fn write_rows<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf> {
    let (path, file) = create(dir, name)?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let (path, mut file) = create(dir, name)?;
    file.write_all(text.as_bytes())?;
    file.flush()?;
    Ok(path)
}

/// Ingests the data, runs every measure and writes `report.txt`,
/// `report.csv` and `curves.csv` to `config.out_dir`.
pub fn analyze(config: &AnalysisConfig) -> Result<AnalyzeOutput> {
    config.validate()?;
    let data = ingest_csv(&config.input, config)?;
    let report = analyze_samples(
        [&data.labels[0], &data.labels[1]],
        &data.sample1,
        &data.sample2,
        config,
    )?;
    let curves = curve_points(&data.sample1, &data.sample2);

    let dir = &config.out_dir;
    let mut text = report.render_text();
    if !data.summary.rejected.is_empty() {
        text.push_str(&format!(
            "Rows read: {}; skipped: {} (first at line {})\n",
            data.summary.rows_read,
            data.summary.rejected.len(),
            data.summary.rejected[0].0
        ));
    }
    let mut files = vec![write_text(dir, "report.txt", &text)?];
    let (path, file) = create(dir, "report.csv")?;
    report.write_csv(file)?;
    files.push(path);
    files.push(write_rows(dir, "curves.csv", &curves)?);
    Ok(AnalyzeOutput {
        report,
        curves,
        ingest: data.summary,
        files,
    })
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub study: StudyResult,
    pub files: Vec<PathBuf>,
}

/// Builds the scenario grid a simulate config describes.
pub fn simulate_grid(config: &SimulateConfig) -> Result<Vec<ScenarioSpec>> {
    let preset = config.preset()?;
    let situations = config.situations()?;
    let grid: Vec<ScenarioSpec> = study_grid(&situations, preset)
        .into_iter()
        .filter(|s| {
            config
                .sizes
                .as_ref()
                .is_none_or(|sz| sz.contains(&[s.n1, s.n2]))
        })
        .filter(|s| {
            config
                .censor_targets
                .as_ref()
                .is_none_or(|cr| cr.iter().any(|c| (c - s.censor_target).abs() < 1e-9))
        })
        .map(|mut s| {
            s.alpha = config.alpha;
            if let Some(n) = config.iterations {
                s.iterations = n;
            }
            if let Some(n) = config.permutations {
                s.permutations = n;
            }
            s
        })
        .collect();
    if grid.is_empty() {
        return Err(Error::Config(
            "the configured sizes and censoring targets select no cells".into(),
        ));
    }
    for s in &grid {
        s.validate()?;
    }
    Ok(grid)
}

/// Runs the study and writes `study.csv`, one `situation_<id>.txt` table
/// per situation and, when the grid is balanced, `summary.txt`.
pub fn simulate(config: &SimulateConfig) -> Result<SimulateOutput> {
    let grid = simulate_grid(config)?;
    let study = run_study(&grid, config.seed)?;
    let dir = &config.out_dir;

    let (path, file) = create(dir, "study.csv")?;
    study.write_csv(file)?;
    let mut files = vec![path];
    let mut seen: Vec<Situation> = grid.iter().map(|s| s.situation).collect();
    seen.dedup();
    for sit in seen {
        files.push(write_text(
            dir,
            &format!("situation_{sit}.txt"),
            &study.render_situation(sit),
        )?);
    }
    let mut summary = String::new();
    for mode in [SummaryMode::Type1Deviation, SummaryMode::Power] {
        if let Ok(table) = summarize_study(&study, mode) {
            summary.push_str(&table.render());
            summary.push('\n');
        }
    }
    if !summary.is_empty() {
        files.push(write_text(dir, "summary.txt", &summary)?);
    }
    Ok(SimulateOutput { study, files })
}

#[derive(Debug, Clone)]
pub struct DiagnoseOutput {
    pub diagnostic: NullDiagnostic,
    pub histogram: Vec<(f64, usize)>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Bin {
    bin_left: f64,
    count: usize,
}

/// Simulates the null distribution of Δ and writes `histogram.csv` and
/// `moments.txt`.
pub fn diagnose_null(config: &DiagnoseConfig) -> Result<DiagnoseOutput> {
    let situation: Situation = config.situation.parse()?;
    if config.bins == 0 || config.draws == 0 {
        return Err(Error::Config("`bins` and `draws` must be positive".into()));
    }
    let spec = ScenarioSpec::builtin(situation, config.n1, config.n2, config.censor_target);
    spec.validate()?;
    let diagnostic = null_delta_diagnostic(&spec, config.draws, config.seed, &AbsOptions::default())?;
    let hist = histogram(&diagnostic.deltas, config.bins);

    let dir = &config.out_dir;
    let bins: Vec<Bin> = hist
        .iter()
        .map(|&(bin_left, count)| Bin { bin_left, count })
        .collect();
    let mut files = vec![write_rows(dir, "histogram.csv", &bins)?];
    let m = &diagnostic.moments;
    let mut text = format!(
        "Null distribution of Delta: situation {situation}, n = {}/{}, censoring target {:.2}\n\
         draws: {} (degenerate: {})\n\
         mean: {:.4}\nsd: {:.4}\nskewness: {:.4}\nexcess kurtosis: {:.4}\n",
        config.n1,
        config.n2,
        config.censor_target,
        m.n,
        diagnostic.degenerate,
        m.mean,
        m.sd,
        m.skewness,
        m.excess_kurtosis
    );
    if !situation.is_null() {
        text.push_str("warning: situation is not a null scenario\n");
    }
    if !m.stable {
        text.push_str("warning: too few usable draws for stable moments\n");
    }
    files.push(write_text(dir, "moments.txt", &text)?);
    Ok(DiagnoseOutput {
        diagnostic,
        histogram: hist,
        files,
    })
}
