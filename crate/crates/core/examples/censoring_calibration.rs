use abs_survival::rng::stream;
use abs_survival::sim::{calibrate_censoring, sample_lifetime, HazardSpec, Situation};
use rand::Rng;

fn main() -> abs_survival::Result<()> {
    let laws = [
        ("exponential(0.25)", HazardSpec::exponential(0.25)?),
        ("Weibull(1.5, 5)", HazardSpec::weibull(1.5, 5.0)?),
        ("situation III, group 1", Situation::III.hazards().0),
    ];
    let mut rng = stream(1, 0);
    for (name, law) in laws {
        for target in [0.15, 0.30, 0.45] {
            // C ~ U(0, a) with a chosen so that P(C < X) = target.
            let a = calibrate_censoring(&law, target)?;
            let n = 100_000;
            let censored = (0..n)
                .filter(|_| {
                    let x = sample_lifetime(&law, &mut rng);
                    let c = rng.random_range(0.0..a);
                    c < x
                })
                .count();
            println!(
                "{name:<24} target {target:.2}  a = {a:>8.3}  replayed {:.4}",
                censored as f64 / n as f64
            );
        }
    }
    Ok(())
}
