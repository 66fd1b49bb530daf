//! Best-1 case: win only by accepting the overall best applicant.
//!
//! After the threshold `d` the positions are split into blocks of `k`. The
//! sliding rule never stops twice inside one block, so the probability of
//! reaching position `m` is one minus the stopping mass accumulated up to
//! `m - k`, which is the sum of all complete earlier blocks plus a partial
//! block. Those block totals are cached as they are completed.

use serde::{Deserialize, Serialize};

use crate::model::check_window;
use crate::{scaled, seen_len, Error, Result, N_EFF};

/// Stopping probabilities of "accept the first candidate after `anchor`".
///
/// `local[a]` is the probability of stopping in the block that contains `a`,
/// up to and including `a`; `block_totals[q]` is the stopping mass of blocks
/// `1..=q`.
#[derive(Debug, Clone)]
pub(crate) struct StopProfile {
    k: usize,
    anchor: usize,
    local: Vec<f64>,
    block_totals: Vec<f64>,
}

impl StopProfile {
    pub(crate) fn new(n: usize, k: usize, anchor: usize) -> Self {
        let blocks = n.saturating_sub(anchor).div_ceil(k);
        let mut profile = StopProfile {
            k,
            anchor,
            local: vec![0.0; n + 1],
            block_totals: vec![0.0; blocks + 1],
        };
        for m in anchor + 1..=n {
            let q = profile.block_of(m);
            let block_start = anchor + (q - 1) * k + 1;
            let reach = 1.0 - profile.before(m.saturating_sub(k));
            let step = reach / seen_len(m, k, n) as f64;
            profile.local[m] = if m == block_start { step } else { profile.local[m - 1] + step };
            if m == anchor + q * k || m == n {
                profile.block_totals[q] = profile.block_totals[q - 1] + profile.local[m];
            }
        }
        profile
    }

    fn block_of(&self, a: usize) -> usize {
        (a - self.anchor).div_ceil(self.k)
    }

    /// Block-local stopping probability, zero at or before the anchor.
    pub(crate) fn local(&self, a: usize) -> f64 {
        if a <= self.anchor {
            0.0
        } else {
            self.local[a]
        }
    }

    /// Probability of having stopped somewhere in `(anchor, a]`.
    pub(crate) fn before(&self, a: usize) -> f64 {
        if a <= self.anchor {
            return 0.0;
        }
        let q = self.block_of(a);
        self.block_totals[q - 1] + self.local[a]
    }
}

/// Memoized block recursion for one `(n, k, d)`.
#[derive(Debug, Clone)]
pub struct Best1Recursion {
    n: usize,
    k: usize,
    d: usize,
    stops: StopProfile,
    sigma: Vec<f64>,
}

impl Best1Recursion {
    pub fn new(n: usize, k: usize, d: usize) -> Result<Self> {
        check_window(n, k)?;
        if d >= n {
            return Err(Error::input(format!("threshold d={d} must be below n={n}")));
        }
        Ok(Self::build(n, k, d))
    }

    fn build(n: usize, k: usize, d: usize) -> Self {
        let stops = StopProfile::new(n, k, d);
        let mut sigma = vec![0.0; n + 1];
        let inv_n = 1.0 / n as f64;
        // The best applicant at j > d is taken iff nothing stopped in (d, j - k].
        for j in d + 1..=n {
            sigma[j] = sigma[j - 1] + inv_n * (1.0 - stops.before(j.saturating_sub(k)));
        }
        Best1Recursion { n, k, d, stops, sigma }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `f_q(a)`: probability of stopping in the current block up to `a`.
    pub fn f(&self, a: usize) -> f64 {
        self.stops.local(a.min(self.n))
    }

    /// Probability of having stopped at some position in `(d, a]`.
    pub fn stopped_by(&self, a: usize) -> f64 {
        self.stops.before(a.min(self.n))
    }

    /// `sigma_q(a)`: probability of winning with a position in `1..=a`.
    pub fn sigma(&self, a: usize) -> f64 {
        self.sigma[a.min(self.n)]
    }

    pub fn win_probability(&self) -> f64 {
        self.sigma[self.n]
    }
}

/// Block-local stopping probability `f_q(a)` for threshold `d`.
///
/// Returns 0 for `a <= d`.
pub fn f_rec(n: usize, k: usize, d: usize, a: usize) -> Result<f64> {
    check_window(n, k)?;
    if a > n {
        return Err(Error::input(format!("position a={a} exceeds n={n}")));
    }
    if a <= d {
        return Ok(0.0);
    }
    Ok(StopProfile::new(n, k, d).local(a))
}

/// Exact win probability of the threshold-`d` policy.
pub fn win_probability(n: usize, k: usize, d: usize) -> Result<f64> {
    Ok(Best1Recursion::new(n, k, d)?.win_probability())
}

/// Win probability for every threshold `d = 0..=n` at once (`d = n` gives 0).
///
/// Works backwards over record positions (applicants better than everyone
/// before them). A record at `y` is followed by the next record at `z` with
/// probability `y / (z (z - 1))`. Starting from a record, the policy wins iff
/// every later record arrives within `k - 1` positions of the previous one,
/// so the last record (the overall best) is the first candidate taken.
pub fn tail_win_probabilities(n: usize, k: usize) -> Result<Vec<f64>> {
    check_window(n, k)?;
    Ok(tail_chain(n, k))
}

pub(crate) fn tail_chain(n: usize, k: usize) -> Vec<f64> {
    let nf = n as f64;
    // suffix[y] = sum_{z >= y} chain(z) / (z (z - 1)) for z >= 2.
    let mut suffix = vec![0.0; n + 2];
    let mut chain = vec![0.0; n + 1];
    for y in (1..=n).rev() {
        let reach = seen_len(y, k, n);
        let yf = y as f64;
        chain[y] = yf / nf + yf * (suffix[y + 1] - suffix[reach + 1]);
        suffix[y] = suffix[y + 1] + if y >= 2 { chain[y] / (yf * (yf - 1.0)) } else { 0.0 };
    }
    let mut out = vec![0.0; n + 1];
    out[0] = chain[1];
    for d in 1..n {
        out[d] = d as f64 * suffix[d + 1];
    }
    out
}

/// Closed form for `k = 2` built from runs of strictly improving ranks.
///
/// Requires `d >= 1` and `n >= d + 3`.
pub fn win_probability_k2(n: usize, d: usize) -> Result<f64> {
    if d < 1 {
        return Err(Error::input("the k=2 closed form needs d >= 1"));
    }
    if n < d + 3 {
        return Err(Error::domain(format!("the k=2 closed form needs n >= d+3, got n={n}, d={d}")));
    }
    let nf = n as f64;
    // ratio_j = sum_{i=d+1}^{j} (i-2)! / (j-1)!, advanced by ratio_{j+1} = (ratio_j + 1) / j.
    let mut ratio = 1.0 / d as f64;
    let mut outer = 0.0;
    for j in d + 1..=n {
        if j >= d + 3 {
            outer += ratio;
        }
        ratio = (ratio + 1.0) / j as f64;
    }
    Ok(2.0 / nf + d as f64 / nf * outer)
}

/// Exact win probability with `d = 0` when `2k >= n`.
pub fn large_window_exact(n: usize, k: usize) -> Result<f64> {
    check_window(n, k)?;
    if 2 * k < n {
        return Err(Error::domain(format!("needs k >= n/2, got n={n}, k={k}")));
    }
    let nf = n as f64;
    let mut inner = 0.0;
    let mut outer = 0.0;
    for j in k + 1..=n {
        inner += 1.0 / (j - 1) as f64;
        outer += 1.0 - inner;
    }
    Ok(k as f64 / nf + outer / nf)
}

/// Large-`n` limit `2 - w + ln w` of [`large_window_exact`], for `w` in `[0.5, 1]`.
pub fn large_window_asymptotic(w: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&w) {
        return Err(Error::domain(format!("w={w} outside [0.5, 1]")));
    }
    Ok(2.0 - w + w.ln())
}

/// Classical secretary problem (`k = 1`) with threshold `d`.
pub fn classical_win_probability(n: usize, d: usize) -> Result<f64> {
    if n == 0 || d >= n {
        return Err(Error::input(format!("need 0 <= d < n, got n={n}, d={d}")));
    }
    if d == 0 {
        return Ok(1.0 / n as f64);
    }
    let tail: f64 = (d + 1..=n).map(|j| 1.0 / (j - 1) as f64).sum();
    Ok(d as f64 * tail / n as f64)
}

/// Normalized parameters and the limiting win probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPoint {
    pub w: f64,
    pub rho: f64,
    pub p_win: f64,
}

impl AsymptoticPoint {
    pub fn evaluate(w: f64, rho: f64) -> Result<Self> {
        Ok(AsymptoticPoint { w, rho, p_win: asymptotic_win_probability(w, rho)? })
    }
}

/// Limiting win probability for `w = k/n`, `rho = d/n`, evaluated with the
/// exact recursion at `n = N_EFF`.
///
/// `w = 0` stands for the classical limit and uses `k = 1`.
pub fn asymptotic_win_probability(w: f64, rho: f64) -> Result<f64> {
    asymptotic_win_probability_at(w, rho, N_EFF)
}

pub fn asymptotic_win_probability_at(w: f64, rho: f64, n_eff: usize) -> Result<f64> {
    let (k, d) = normalized_to_integer(w, rho, n_eff)?;
    Ok(Best1Recursion::build(n_eff, k, d).win_probability())
}

pub(crate) fn normalized_window(w: f64, n_eff: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::domain(format!("w={w} outside [0, 1]")));
    }
    if n_eff < 2 {
        return Err(Error::input("n_eff must be at least 2"));
    }
    Ok(scaled(w, n_eff).clamp(1, n_eff))
}

pub(crate) fn normalized_threshold(rho: f64, n_eff: usize) -> Result<usize> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain(format!("threshold fraction {rho} outside [0, 1)")));
    }
    Ok(scaled(rho, n_eff).min(n_eff - 1))
}

fn normalized_to_integer(w: f64, rho: f64, n_eff: usize) -> Result<(usize, usize)> {
    Ok((normalized_window(w, n_eff)?, normalized_threshold(rho, n_eff)?))
}
