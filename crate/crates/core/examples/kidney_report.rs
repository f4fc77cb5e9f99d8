// Full two-sample report on the kidney dialysis catheter data
// (time to first exit-site infection, months).

use std::path::Path;

use abs_survival::io::{analyze_samples, ingest_csv, AnalysisConfig};

fn main() -> abs_survival::Result<()> {
    let data_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let config = AnalysisConfig {
        input: data_dir.join("kidney.csv"),
        group_column: "type".into(),
        group1: Some("2".into()), // percutaneous
        group2: Some("1".into()), // surgical
        status_column: "delta".into(),
        split: Some(8.0),
        seed: 2020,
        ..Default::default()
    };
    let data = ingest_csv(&config.input, &config)?;
    let report = analyze_samples(
        [&data.labels[0], &data.labels[1]],
        &data.sample1,
        &data.sample2,
        &config,
    )?;
    print!("{}", report.render_text());
    Ok(())
}
