// Acceptance checks. Prints one PASS/FAIL line per check and exits nonzero
// if any check fails.

use std::path::Path;
use std::time::Instant;

use abs_survival::abs::{
    abs_statistic, null_delta_diagnostic, permutation_test, resample_split, AbsOptions,
    IntervalMode, IntervalSpec, PermutationOptions,
};
use abs_survival::compare::{
    cox_score_test, hazard_ratio, logrank_test, rmst, rmst_difference_test, Ties,
};
use abs_survival::io::{analyze_samples, ingest_csv, load_analysis_config, AnalysisReport};
use abs_survival::rng::{stream, StreamRng};
use abs_survival::sim::{
    run_cell, summarize_study, CellResult, ScenarioSpec, Situation, StudyResult, SummaryMode,
    TestKind,
};
use abs_survival::surv::{km_estimate, pooled_grid, FollowUpRule, Sample};
use rand::Rng;

const SEED: u64 = 1;

type Section = (&'static str, fn(&mut Checks));

struct Checks {
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, id: &str, what: &str, ok: bool, detail: String) {
        println!("{} [{id}] {what}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(format!("[{id}] {what}"));
        }
    }

    fn near(&mut self, id: &str, what: &str, got: f64, want: f64, tol: f64) {
        self.check(
            id,
            what,
            (got - want).abs() <= tol,
            format!("got {got:.4}, expected {want} ± {tol}"),
        );
    }
}

fn uncensored(times: &[f64]) -> Sample {
    Sample::from_pairs(&times.iter().map(|&t| (t, true)).collect::<Vec<_>>()).unwrap()
}

fn small_instance(c: &mut Checks) {
    let a = uncensored(&[1.0, 3.0, 5.0]);
    let b = uncensored(&[2.0, 4.0, 6.0]);
    // hand sums: unit gaps, |S1 - S2| alternates 1/3, 0
    let abs_oracle = 1.0 / 3.0 + 0.0 + 1.0 / 3.0 + 0.0 + 1.0 / 3.0;
    let rmst1_oracle = 1.0 * 1.0 + (2.0 / 3.0) * 2.0 + (1.0 / 3.0) * 2.0;
    let rmst2_oracle = 1.0 * 2.0 + (2.0 / 3.0) * 2.0 + (1.0 / 3.0) * 2.0;

    let abs = abs_statistic(&a, &b, &AbsOptions::default()).unwrap().abs_value;
    let r1 = rmst(&km_estimate(&a), 6.0).unwrap().0;
    let r2 = rmst(&km_estimate(&b), 6.0).unwrap().0;
    let d = rmst_difference_test(&a, &b, Some(6.0), 0.95, FollowUpRule::Formula)
        .unwrap()
        .estimate
        .unwrap();
    for (what, got, want) in [
        ("ABS {1,3,5} vs {2,4,6}", abs, abs_oracle),
        ("RMST1 tau=6", r1, rmst1_oracle),
        ("RMST2 tau=6", r2, rmst2_oracle),
        ("RMSTd tau=6", d, rmst1_oracle - rmst2_oracle),
    ] {
        c.check(
            "1",
            what,
            (got - want).abs() <= 1e-12,
            format!("got {got}, oracle {want}"),
        );
    }
}

fn kidney_report(permutations: usize) -> (Sample, Sample, AnalysisReport) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut cfg = load_analysis_config(&dir.join("kidney.toml")).unwrap();
    cfg.n_resamples = permutations;
    let d = ingest_csv(&cfg.input, &cfg).unwrap();
    let report = analyze_samples(
        [&d.labels[0], &d.labels[1]],
        &d.sample1,
        &d.sample2,
        &cfg,
    )
    .unwrap();
    (d.sample1, d.sample2, report)
}

fn kidney(c: &mut Checks) {
    let start = Instant::now();
    let (perc, surg, report) = kidney_report(1000);
    let elapsed = start.elapsed().as_secs_f64();
    let row = |m: &str| report.row(m).unwrap().clone();

    c.near("2", "kidney ABS", row("ABS").estimate.unwrap(), 5.120, 0.005);

    let rmstd = row("RMSTd");
    let (lo, hi) = rmstd.ci().unwrap();
    c.near("2", "kidney RMSTd CI lower", lo, 0.185, 0.02);
    c.near("2", "kidney RMSTd CI upper", hi, 8.491, 0.02);

    let score = cox_score_test(&perc, &surg, Ties::Efron).unwrap().p_value;
    let mantel = logrank_test(&perc, &surg).unwrap().p_value;
    c.check(
        "2",
        "kidney log-rank P (Cox score test)",
        (score - 0.118).abs() <= 0.005,
        format!("got {score:.4}, expected 0.118 ± 0.005 (Mantel form: {mantel:.4})"),
    );
    let hr = hazard_ratio(&perc, &surg, 0.95, Ties::Efron).unwrap();
    c.near("2", "kidney HR", hr.estimate.unwrap(), 0.542, 0.01);
    c.near("2", "kidney ABSP P", row("ABS").p_value.unwrap(), 0.030, 0.015);
    c.near("2", "kidney ABSi_R P", row("ABSi_R").p_value.unwrap(), 0.024, 0.015);
    c.check(
        "2",
        "kidney runtime with 1000 permutations",
        elapsed < 10.0,
        format!("{elapsed:.2} s (limit 10 s)"),
    );
}

// Kept apart from the other kidney checks: at tau = v = 27.5 the estimate is
// 4.338 while the target interval (0.185, 8.491) is centred on 4.338.
fn kidney_rmstd_estimate(c: &mut Checks) {
    let (perc, surg, _) = kidney_report(10);
    let t = rmst_difference_test(&perc, &surg, None, 0.95, FollowUpRule::Formula).unwrap();
    c.near("2", "kidney RMSTd estimate", t.estimate.unwrap(), 4.438, 0.01);
}

fn desk_cell(sit: Situation, n: usize, cr: f64) -> CellResult {
    let spec = ScenarioSpec::builtin(sit, n, n, cr).with_preset(abs_survival::sim::Preset::Desk);
    run_cell(&spec, SEED).unwrap()
}

fn type1(c: &mut Checks) {
    let mut below = 0;
    for cr in [0.0, 0.15, 0.30, 0.45] {
        let cell = desk_cell(Situation::I, 50, cr);
        for kind in [TestKind::Logrank, TestKind::Rmstd, TestKind::Absp] {
            let r = cell.rate(kind);
            c.check(
                "3",
                &format!("type I error {} {}", kind.label(), cell.label()),
                (0.03..=0.07).contains(&r),
                format!("rate {r:.3}, allowed [0.03, 0.07]"),
            );
        }
        let z = cell.rate(TestKind::AbsNormal);
        if [TestKind::Logrank, TestKind::Rmstd, TestKind::Absp]
            .iter()
            .all(|&k| z <= cell.rate(k))
        {
            below += 1;
        }
    }
    c.check(
        "3",
        "normal-approximation ABS test is the most conservative",
        below >= 3,
        format!("{below} of 4 cells (need 3)"),
    );
}

fn crossing_power(c: &mut Checks) {
    let v = desk_cell(Situation::V, 100, 0.0);
    let (absp, lr) = (v.rate(TestKind::Absp), v.rate(TestKind::Logrank));
    c.check("4", "situation V ABSP power", absp >= 0.95, format!("{absp:.3} (need >= 0.95)"));
    c.check("4", "situation V log-rank power", lr <= 0.85, format!("{lr:.3} (need <= 0.85)"));
    let vi = desk_cell(Situation::VI, 100, 0.0);
    let (absp, lr) = (vi.rate(TestKind::Absp), vi.rate(TestKind::Logrank));
    c.check("4", "situation VI ABSP power", absp >= 0.99, format!("{absp:.3} (need >= 0.99)"));
    c.check("4", "situation VI log-rank power", lr <= 0.15, format!("{lr:.3} (need <= 0.15)"));
}

fn proportional_hazards(c: &mut Checks) {
    let cell = desk_cell(Situation::II, 20, 0.0);
    let (lr, absp) = (cell.rate(TestKind::Logrank), cell.rate(TestKind::Absp));
    c.check(
        "5",
        "situation II 20/20 log-rank vs ABSP power",
        lr >= absp - 0.05,
        format!("log-rank {lr:.3}, ABSP {absp:.3}"),
    );
}

fn random_sample(rng: &mut StreamRng) -> Sample {
    let n = rng.random_range(2..30);
    let pairs: Vec<(f64, bool)> = (0..n)
        .map(|_| (rng.random_range(1..60) as f64 * 0.25, rng.random_bool(0.7)))
        .collect();
    Sample::from_pairs(&pairs).unwrap()
}

fn property_suite(c: &mut Checks) {
    let opts = AbsOptions::default();
    let mut violations: Vec<String> = Vec::new();
    let mut checked = 0;
    for i in 0..200 {
        let mut rng = stream(SEED, i);
        let (a, b) = (random_sample(&mut rng), random_sample(&mut rng));
        let mut fail = |what: &str| violations.push(format!("dataset {i}: {what}"));

        let c1 = km_estimate(&a);
        if !c1.surv().windows(2).all(|w| w[1] <= w[0]) {
            fail("KM not monotone");
        }
        let gw: Vec<f64> = c1
            .surv()
            .iter()
            .zip(c1.var())
            .take_while(|(s, _)| **s > 0.0)
            .map(|(s, v)| v / (s * s))
            .collect();
        if !gw.windows(2).all(|w| w[1] >= w[0] - 1e-12) {
            fail("Greenwood sum decreases");
        }

        let (Ok(ab), Ok(ba)) = (abs_statistic(&a, &b, &opts), abs_statistic(&b, &a, &opts)) else {
            continue;
        };
        checked += 1;
        if ab.abs_value < 0.0 {
            fail("negative ABS");
        }
        if (ab.abs_value - ba.abs_value).abs() > 1e-12 || (ab.delta - ba.delta).abs() > 1e-12 {
            fail("swap changes ABS or Delta");
        }
        let k = rng.random_range(0.1..10.0);
        let scaled = abs_statistic(&a.scaled(k).unwrap(), &b.scaled(k).unwrap(), &opts).unwrap();
        if (scaled.delta - ab.delta).abs() > 1e-9 {
            fail("Delta not scale invariant");
        }
        if let Ok(t) = rmst_difference_test(&a, &b, None, 0.95, FollowUpRule::Formula) {
            if t.estimate.unwrap().abs() > ab.abs_value + 1e-10 {
                fail("|RMSTd| exceeds ABS");
            }
        }
        let v = pooled_grid(&a, &b, FollowUpRule::Formula).unwrap().v;
        let split = v * rng.random_range(0.05..0.95);
        let piece = |iv: IntervalSpec| {
            abs_statistic(&a, &b, &opts.with_interval(iv)).map(|r| r.abs_value)
        };
        if let (Ok(l), Ok(r)) = (
            piece(IntervalSpec::new(0.0, Some(split), IntervalMode::Clamped)),
            piece(IntervalSpec::new(split, None, IntervalMode::Clamped)),
        ) {
            if (l + r - ab.abs_value).abs() > 1e-10 * ab.abs_value.max(1.0) {
                fail("clamped pieces do not add up");
            }
        }
        let popts = PermutationOptions {
            n_resamples: 25,
            seed: i,
            ..Default::default()
        };
        if let Ok(p) = permutation_test(&a, &b, &popts) {
            if permutation_test(&a, &b, &popts).unwrap() != p {
                fail("permutation not deterministic");
            }
        }
        let pooled = Sample::pooled(&a, &b);
        let (x, y) = resample_split(&pooled, a.len(), &mut rng);
        let mut joined: Vec<(u64, bool)> = x
            .observations()
            .iter()
            .chain(y.observations())
            .map(|o| (o.time.to_bits(), o.event))
            .collect();
        let mut want: Vec<(u64, bool)> =
            pooled.observations().iter().map(|o| (o.time.to_bits(), o.event)).collect();
        joined.sort();
        want.sort();
        if joined != want || x.len() != a.len() {
            fail("resample changes the pooled multiset");
        }
    }
    c.check(
        "6",
        "property suite on 200 random datasets",
        violations.is_empty() && checked >= 190,
        if violations.is_empty() {
            format!("{checked} datasets with a defined ABS, no violations")
        } else {
            violations.join("; ")
        },
    );
}

fn null_skewness(c: &mut Checks) {
    let spec = ScenarioSpec::builtin(Situation::I, 50, 50, 0.0);
    let d = null_delta_diagnostic(&spec, 1000, SEED, &AbsOptions::default()).unwrap();
    let s = d.moments.skewness;
    c.check(
        "7",
        "null Delta skewness, situation I 50/50, 1000 draws",
        s > 0.0 && d.moments.n >= 990,
        format!("skewness {s:.3} over {} draws", d.moments.n),
    );
}

fn summarizer(c: &mut Checks) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/type1_situation_I_reference.csv");
    let study = StudyResult::read_csv(std::fs::File::open(path).unwrap()).unwrap();
    let table = summarize_study(&study, SummaryMode::Type1Deviation).unwrap();
    let absp = table.get("NUM", "(20, 20)").unwrap().values[3];
    c.check(
        "8",
        "summarizer ABSP x NUM(20, 20) from reference rates",
        format!("{absp:.3}") == "-1.250" && (absp + 1.25).abs() < 1e-9,
        format!("got {absp:.6}, expected -1.250"),
    );
}

fn main() {
    let mut c = Checks { failed: Vec::new() };
    let sections: [Section; 9] = [
        ("1", small_instance),
        ("2", kidney),
        ("2", kidney_rmstd_estimate),
        ("3", type1),
        ("4", crossing_power),
        ("5", proportional_hazards),
        ("6", property_suite),
        ("7", null_skewness),
        ("8", summarizer),
    ];
    for (id, f) in sections {
        let t = Instant::now();
        f(&mut c);
        println!("     [{id}] finished in {:.1} s", t.elapsed().as_secs_f64());
    }
    println!();
    if c.failed.is_empty() {
        println!("all acceptance checks passed");
    } else {
        println!("{} acceptance check(s) failed:", c.failed.len());
        for f in &c.failed {
            println!("  {f}");
        }
        std::process::exit(1);
    }
}
