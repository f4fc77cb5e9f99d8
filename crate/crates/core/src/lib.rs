//! Area between two survival curves (ABS) for right-censored two-sample data.
//!
//! The crate estimates Kaplan-Meier curves, measures the absolute area between
//! them over the whole follow-up or any sub-interval, and tests it with a
//! permutation procedure on the standardized statistic Δ. Log-rank, Cox
//! hazard ratio and RMST-difference analyses are provided as comparators, and
//! [`sim`] runs Monte Carlo studies of all four tests.
//!
//! ```
//! use abs_survival::abs::{permutation_test, PermutationOptions};
//! use abs_survival::surv::Sample;
//!
//! let a = Sample::from_pairs(&[(1.0, true), (3.0, true), (5.0, true), (6.0, false)]).unwrap();
//! let b = Sample::from_pairs(&[(2.0, true), (4.0, true), (7.0, true), (8.0, false)]).unwrap();
//! let opts = PermutationOptions { n_resamples: 200, seed: 1, ..Default::default() };
//! let r = permutation_test(&a, &b, &opts).unwrap();
//! assert!((0.0..=1.0).contains(&r.p_value));
//! ```

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abs;
pub mod compare;
pub mod error;
pub mod io;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod surv;

pub use error::{Error, Result};
pub use stats::TestResult;
