//! CSV ingestion, run configuration, reports and the command drivers.

mod commands;
mod config;
mod ingest;
mod report;

pub use commands::{
    analyze, diagnose_null, simulate, simulate_grid, AnalyzeOutput, DiagnoseOutput,
    SimulateOutput,
};
pub use config::{
    load_analysis_config, load_diagnose_config, load_simulate_config, parse_config,
    AnalysisConfig, DiagnoseConfig, Overrides, SimulateConfig,
};
pub use ingest::{ingest_csv, ingest_reader, Dataset, IngestSummary};
pub use report::{
    analyze_samples, curve_points, AnalysisReport, CurvePoint, GroupSummary, MeasureRow,
};
