//! Ground truth by exhaustive enumeration and by seeded simulation.
//!
//! Monte Carlo runs draw permutations with an explicit Fisher-Yates shuffle
//! driven by ChaCha8 (`rand_chacha`). Trials are cut into blocks of
//! [`BLOCK_TRIALS`]; block `b` uses the generator seeded with `seed` on
//! stream `b`. Blocks only report integer win counts, so the combined
//! estimate does not depend on how blocks are scheduled across threads.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::play;
use crate::{Error, Policy, ProblemSpec, Result};

/// Largest `n` accepted by [`exact_win_probability`] (11! is about 4e7).
pub const MAX_EXACT_N: usize = 11;

/// Trials per Monte Carlo block.
pub const BLOCK_TRIALS: u64 = 4096;

/// Win count over all `n!` permutations, kept unreduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFraction", into = "RawFraction")]
pub struct ExactProbability {
    numerator: BigUint,
    denominator: BigUint,
}

impl ExactProbability {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() || numerator > denominator {
            return Err(Error::input(format!("{numerator}/{denominator} is not a probability")));
        }
        Ok(ExactProbability { numerator, denominator })
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// Lowest-terms form.
    pub fn reduced(&self) -> (BigUint, BigUint) {
        let g = self.numerator.gcd(&self.denominator);
        (&self.numerator / &g, &self.denominator / &g)
    }

    pub fn to_f64(&self) -> f64 {
        // Both sides fit in f64 exactly for n <= 18, far above the enumeration cap.
        self.numerator.to_f64().unwrap_or(f64::NAN) / self.denominator.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} = {:.6}", self.numerator, self.denominator, self.to_f64())
    }
}

#[derive(Serialize, Deserialize)]
struct RawFraction {
    numerator: String,
    denominator: String,
    value: f64,
}

impl From<ExactProbability> for RawFraction {
    fn from(p: ExactProbability) -> Self {
        RawFraction {
            numerator: p.numerator.to_string(),
            denominator: p.denominator.to_string(),
            value: p.to_f64(),
        }
    }
}

impl TryFrom<RawFraction> for ExactProbability {
    type Error = Error;

    fn try_from(raw: RawFraction) -> Result<Self> {
        let parse = |s: &str| {
            s.parse::<BigUint>().map_err(|_| Error::input(format!("{s:?} is not an integer")))
        };
        ExactProbability::new(parse(&raw.numerator)?, parse(&raw.denominator)?)
    }
}

/// Win probability of `policy` over every rank permutation, in lexicographic order.
pub fn exact_win_probability(spec: &ProblemSpec, policy: &Policy) -> Result<ExactProbability> {
    let policy = policy.validated(spec)?;
    let n = spec.n;
    if n > MAX_EXACT_N {
        return Err(Error::Resource(format!(
            "exhaustive enumeration is capped at n={MAX_EXACT_N}, got n={n}"
        )));
    }
    // One task per leading rank; each walks the remaining ranks lexicographically.
    let wins: u64 = (1..=n)
        .into_par_iter()
        .map(|lead| {
            let mut ranks: Vec<usize> = std::iter::once(lead)
                .chain((1..=n).filter(|&r| r != lead))
                .collect();
            let mut wins = 0u64;
            loop {
                wins += u64::from(play(&ranks, spec.k, &policy).win);
                if !next_permutation(&mut ranks[1..]) {
                    break;
                }
            }
            wins
        })
        .sum();
    let total: BigUint = (1..=n).map(BigUint::from).product();
    ExactProbability::new(BigUint::from(wins), total)
}

/// Advances `xs` to its lexicographic successor; false when `xs` was the last one.
fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|&x| x > xs[i]).expect("a larger element exists past i");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// Seeded simulation estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub wins: u64,
    pub std_err: f64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Combines per-block win counts into one estimate.
    pub fn from_wins(wins: u64, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        let p_hat = wins as f64 / trials as f64;
        let std_err = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        Ok(MonteCarloEstimate { p_hat, trials, wins, std_err, seed })
    }
}

/// Runs `trials` uniformly random permutations through `policy`.
pub fn monte_carlo(
    spec: &ProblemSpec,
    policy: &Policy,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let policy = policy.validated(spec)?;
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let wins: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            simulate_block(spec, &policy, seed, b, len)
        })
        .sum();
    MonteCarloEstimate::from_wins(wins, trials, seed)
}

/// Win count of block `block` holding `len` trials. `policy` must already be
/// validated against `spec`.
pub fn simulate_block(spec: &ProblemSpec, policy: &Policy, seed: u64, block: u64, len: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut ranks: Vec<usize> = (1..=spec.n).collect();
    let mut wins = 0;
    for _ in 0..len {
        for i in (1..ranks.len()).rev() {
            let j = rng.gen_range(0..=i);
            ranks.swap(i, j);
        }
        wins += u64::from(play(&ranks, spec.k, policy).win);
    }
    wins
}
