//! Solvers for the sliding-window secretary problem.
//!
//! An interviewer sees `n` applicants in uniformly random order and may accept
//! any of the last `k` applicants seen. Three payoff regimes are covered:
//!
//! - [`ProblemCase::Best1`]: win by accepting the overall best applicant.
//! - [`ProblemCase::Best2`]: win by accepting the best or second best.
//! - [`ProblemCase::TwoChoice`]: accept up to two applicants, win if either is
//!   the overall best.
//!
//! Every regime is solved by threshold policies. The [`best1`], [`best2`] and
//! [`twochoice`] modules evaluate a policy exactly through block recursions,
//! [`oracle`] evaluates it by exhaustive enumeration or seeded simulation, and
//! [`optimize`] searches thresholds for finite `n` and for the normalized
//! large-`n` limit.

pub mod best1;
pub mod best2;
mod error;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod twochoice;

pub use error::{Error, Result};
pub use model::{
    classify_candidate, run_policy, CandidateClass, Outcome, Policy, ProblemCase, ProblemSpec,
    RankSequence,
};

/// Synthetic population size used to evaluate normalized (large-`n`) quantities.
pub const N_EFF: usize = 100_000;

/// Converts a normalized fraction of `n` into an index count, rounding to nearest.
pub(crate) fn scaled(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).round() as usize
}

/// Size of the seen set when the window starts at `i` (1-based).
#[inline]
pub(crate) fn seen_len(i: usize, k: usize, n: usize) -> usize {
    (i + k - 1).min(n)
}
