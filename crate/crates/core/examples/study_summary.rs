// Marginal means of a study file. The bundled file holds reference
// type I error rates for situation I (1000 datasets per cell).

use std::fs::File;
use std::path::Path;

use abs_survival::sim::{summarize_study, StudyResult, SummaryMode};

fn main() -> abs_survival::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/type1_situation_I_reference.csv");
    let study = StudyResult::read_csv(File::open(path)?)?;
    let table = summarize_study(&study, SummaryMode::Type1Deviation)?;
    print!("{}", table.render());
    Ok(())
}
