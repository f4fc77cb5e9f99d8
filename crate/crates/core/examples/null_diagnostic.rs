use abs_survival::abs::{null_delta_diagnostic, AbsOptions};
use abs_survival::sim::{ScenarioSpec, Situation};
use abs_survival::stats::histogram;

fn main() -> abs_survival::Result<()> {
    let spec = ScenarioSpec::builtin(Situation::I, 50, 50, 0.0);
    let diag = null_delta_diagnostic(&spec, 1000, 5, &AbsOptions::default())?;
    let m = diag.moments;
    println!(
        "{} null draws: mean {:.3}, sd {:.3}, skewness {:.3}, excess kurtosis {:.3}",
        m.n, m.mean, m.sd, m.skewness, m.excess_kurtosis
    );

    // Text histogram; the long right tail is why ABSP uses permutations.
    let hist = histogram(&diag.deltas, 16);
    let peak = hist.iter().map(|&(_, c)| c).max().unwrap_or(1);
    for (left, count) in hist {
        println!("{left:>7.2} | {}", "#".repeat(count * 50 / peak));
    }
    Ok(())
}
