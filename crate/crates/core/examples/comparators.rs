use abs_survival::compare::{cox_score_test, hazard_ratio, logrank_test, rmst_difference_test, Ties};
use abs_survival::surv::{FollowUpRule, Sample};

fn main() -> abs_survival::Result<()> {
    let a = Sample::from_pairs(&[
        (1.0, true), (2.0, true), (2.0, false), (3.5, true), (5.0, true),
        (6.0, false), (7.5, true), (9.0, false), (10.0, true), (12.0, false),
    ])?;
    let b = Sample::from_pairs(&[
        (0.5, true), (1.0, true), (1.5, true), (2.0, true), (2.5, false),
        (3.0, true), (4.0, true), (4.5, false), (6.5, true), (8.0, false),
    ])?;

    let lr = logrank_test(&a, &b)?;
    println!("log-rank chi2 = {:.4}, P = {:.4}", lr.statistic, lr.p_value);

    let score = cox_score_test(&a, &b, Ties::Efron)?;
    println!("Cox score test (Efron ties) P = {:.4}", score.p_value);

    for ties in [Ties::Efron, Ties::Breslow] {
        let hr = hazard_ratio(&a, &b, 0.95, ties)?;
        println!(
            "HR ({ties:?}) = {:.3} ({:.3}, {:.3}), Wald P = {:.4}, {} Newton steps",
            hr.estimate.unwrap(),
            hr.ci_lo.unwrap(),
            hr.ci_hi.unwrap(),
            hr.p_value,
            hr.extra("iterations").unwrap()
        );
    }

    // tau defaults to the follow-up end v.
    let rmst = rmst_difference_test(&a, &b, None, 0.95, FollowUpRule::Formula)?;
    println!(
        "RMST1 = {:.3}, RMST2 = {:.3}, difference = {:.3} ({:.3}, {:.3}), P = {:.4}, tau = {}",
        rmst.extra("rmst1").unwrap(),
        rmst.extra("rmst2").unwrap(),
        rmst.estimate.unwrap(),
        rmst.ci_lo.unwrap(),
        rmst.ci_hi.unwrap(),
        rmst.p_value,
        rmst.extra("tau").unwrap()
    );
    Ok(())
}
