use abs_survival::surv::{km_estimate, median_survival, Sample};

fn main() -> abs_survival::Result<()> {
    // (time, event) pairs; `false` marks a censored subject.
    let sample = Sample::from_pairs(&[
        (2.0, true),
        (3.0, false),
        (4.0, true),
        (4.0, true),
        (5.5, false),
        (7.0, true),
        (9.0, true),
        (11.0, false),
    ])?;

    let curve = km_estimate(&sample);
    println!("Kaplan-Meier estimate ({} subjects, {} events)", sample.len(), sample.n_events());
    println!("{:>6} {:>4} {:>4} {:>8} {:>10}", "t", "Y", "d", "S(t)", "Var S(t)");
    for i in 0..curve.grid().len() {
        println!(
            "{:>6.1} {:>4} {:>4} {:>8.4} {:>10.6}",
            curve.grid()[i],
            curve.n_at_risk()[i],
            curve.n_events()[i],
            curve.surv()[i],
            curve.var()[i]
        );
    }

    // The curve is a right-continuous step function.
    for t in [0.0, 3.9, 4.0, 10.0] {
        let (s, var) = curve.eval(t);
        println!("S({t}) = {s:.4}  (se {:.4})", var.sqrt());
    }
    match median_survival(&curve) {
        Some(m) => println!("median survival: {m}"),
        None => println!("median survival: not reached"),
    }
    Ok(())
}
