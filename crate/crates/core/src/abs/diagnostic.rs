use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{abs_statistic, AbsOptions};
use crate::error::Result;
use crate::rng;
use crate::sim::{DatasetGenerator, ScenarioSpec};
use crate::stats::{moment_summary, MomentSummary};

/// Simulated null distribution of Δ with moment diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDiagnostic {
    /// Δ of every non-degenerate draw, in draw order.
    pub deltas: Vec<f64>,
    /// Draws skipped because Δ was undefined.
    pub degenerate: usize,
    pub moments: MomentSummary,
    pub seed: u64,
}

/// Draws `n_draws` datasets from `scenario` and records the full-range Δ of
/// each. The scenario is expected to be a null one (equal hazards); with
/// fewer than 8 usable draws the moment summary is flagged unstable.
pub fn null_delta_diagnostic(
    scenario: &ScenarioSpec,
    n_draws: usize,
    seed: u64,
    options: &AbsOptions,
) -> Result<NullDiagnostic> {
    let generator = DatasetGenerator::new(scenario)?;
    let key = rng::derive_key(seed, &[0xd1a6]);
    let draws: Vec<Option<f64>> = (0..n_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(key, i as u64);
            let (a, b) = generator.generate(&mut rng);
            abs_statistic(&a, &b, options).ok().map(|r| r.delta)
        })
        .collect();
    let degenerate = draws.iter().filter(|d| d.is_none()).count();
    let deltas: Vec<f64> = draws.into_iter().flatten().collect();
    Ok(NullDiagnostic {
        moments: moment_summary(&deltas),
        deltas,
        degenerate,
        seed,
    })
}
