use abs_survival::sim::{run_study, ScenarioSpec, Situation, TestKind};

// A small study: crossing curves (situation V) against the null (situation I).
fn main() -> abs_survival::Result<()> {
    let grid: Vec<ScenarioSpec> = [Situation::I, Situation::V]
        .into_iter()
        .map(|sit| ScenarioSpec {
            iterations: 100,
            permutations: 200,
            ..ScenarioSpec::builtin(sit, 50, 50, 0.15)
        })
        .collect();

    let study = run_study(&grid, 11)?;
    for cell in &study.cells {
        print!("{:<20} censored {:.3} ", cell.label(), cell.mean_censoring);
        for kind in TestKind::ALL {
            print!(" {}={:.2}", kind.label(), cell.rate(kind));
        }
        println!();
    }
    println!();
    print!("{}", study.render_situation(Situation::V));

    let mut csv = Vec::new();
    study.write_csv(&mut csv)?;
    println!("\n{}", String::from_utf8_lossy(&csv));
    Ok(())
}
