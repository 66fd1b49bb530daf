//! 2-Choice case: accept up to two applicants, win if either is the best.
//!
//! The first pick is the first 1-candidate after `delta1`. Once a pick is made
//! at `m`, everyone up to `m + k - 1` is known to be worse than it, so the
//! rest of the search is a Best-1 problem with threshold `m + k - 1`, further
//! restricted by `delta2`. The win probability decomposes as
//!
//! - `sigma1`: the first pick is the best, i.e. the Best-1 value at `delta1`.
//! - `sigma2`: the first pick lands in `(delta1, delta2 - k + 1]` (probability
//!   `p_b`) and the second pick, made after `delta2`, is the best.
//! - `sigma3`: the first pick lands at `m > delta2 - k + 1` and the second
//!   pick, made after `m + k - 1`, is the best.

use crate::best1::{normalized_threshold, normalized_window, tail_chain, StopProfile};
use crate::model::check_window;
use crate::{seen_len, Error, Policy, ProblemCase, ProblemSpec, Result, N_EFF};

/// Block-local probability of a first pick up to `a`, given none at or
/// before `x`. Zero for `a <= x`.
pub fn f2(n: usize, k: usize, x: usize, a: usize) -> Result<f64> {
    check_window(n, k)?;
    if x > n || a > n {
        return Err(Error::input(format!("need x, a <= n={n}, got x={x}, a={a}")));
    }
    Ok(StopProfile::new(n, k, x).local(a))
}

/// Probability that the first candidate after `x` is taken exactly at `m`.
pub fn c_stop(n: usize, k: usize, m: usize, x: usize) -> Result<f64> {
    check_window(n, k)?;
    if m > n {
        return Err(Error::input(format!("position m={m} exceeds n={n}")));
    }
    Ok(stop_at(&StopProfile::new(n, k, x), n, k, m, x))
}

fn stop_at(profile: &StopProfile, n: usize, k: usize, m: usize, x: usize) -> f64 {
    if m <= x {
        return 0.0;
    }
    (1.0 - profile.before(m.saturating_sub(k))) / seen_len(m, k, n) as f64
}

/// Probability of a first pick at `m` (after `x`) followed by no second pick
/// in `(m + k - 1, b - k]`. Zero when `b - m < k`.
pub fn g_gap(n: usize, k: usize, m: usize, x: usize, b: usize) -> Result<f64> {
    check_window(n, k)?;
    if m <= x || m > n || b > n {
        return Err(Error::input(format!("need x < m <= n and b <= n, got x={x}, m={m}, b={b}")));
    }
    if b < m + k {
        return Ok(0.0);
    }
    let first = StopProfile::new(n, k, x);
    let second = StopProfile::new(n, k, m + k - 1);
    Ok(stop_at(&first, n, k, m, x) * (1.0 - second.before(b - k)))
}

/// Evaluator shared by all thresholds of one `(n, k)`.
#[derive(Debug, Clone)]
pub struct TwoChoiceProfile {
    n: usize,
    k: usize,
    tail: Vec<f64>,
}

impl TwoChoiceProfile {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_window(n, k)?;
        Ok(Self::build(n, k))
    }

    fn build(n: usize, k: usize) -> Self {
        TwoChoiceProfile { n, k, tail: tail_chain(n, k) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Best-1 win probability with threshold `b`, zero for `b >= n`.
    fn tail(&self, b: usize) -> f64 {
        self.tail.get(b).copied().unwrap_or(0.0)
    }

    /// Fixes `delta1`; every `delta2` can then be evaluated in constant time.
    pub fn first_threshold(&self, delta1: usize) -> FirstThreshold<'_> {
        let (n, k) = (self.n, self.k);
        let first = StopProfile::new(n, k, delta1);
        // later[m] = sum over m' >= m of P(first pick at m') * P1(m' + k - 1).
        let mut later = vec![0.0; n + 2];
        for m in (1..=n).rev() {
            later[m] = later[m + 1] + stop_at(&first, n, k, m, delta1) * self.tail(m + k - 1);
        }
        FirstThreshold { profile: self, delta1, first, later }
    }
}

/// Precomputed state for one `delta1`.
#[derive(Debug, Clone)]
pub struct FirstThreshold<'a> {
    profile: &'a TwoChoiceProfile,
    delta1: usize,
    first: StopProfile,
    later: Vec<f64>,
}

impl FirstThreshold<'_> {
    /// Probability of a first pick in `(delta1, delta2 - k + 1]`.
    pub fn p_b(&self, delta2: usize) -> f64 {
        (delta2 + 1)
            .checked_sub(self.profile.k)
            .map_or(0.0, |b| self.first.before(b.min(self.profile.n)))
    }

    pub fn sigmas(&self, delta2: usize) -> [f64; 3] {
        let p = self.profile;
        let start = (self.delta1 + 1).max((delta2 + 2).saturating_sub(p.k)).min(p.n + 1);
        [p.tail(self.delta1), self.p_b(delta2) * p.tail(delta2), self.later[start]]
    }

    pub fn win_probability(&self, delta2: usize) -> f64 {
        let (n, k) = (self.profile.n, self.profile.k);
        // With k >= n/2, taking the first candidate and then the first one
        // after the initial window always catches the best; the floating
        // sum would only reach 1 up to rounding.
        if self.delta1 == 0 && 2 * k >= n && delta2 == k.min(n - 1) {
            return 1.0;
        }
        self.sigmas(delta2).iter().sum::<f64>().min(1.0)
    }
}

/// Probability that either pick is the overall best.
pub fn win_probability(n: usize, k: usize, delta1: usize, delta2: usize) -> Result<f64> {
    let policy = Policy::TwoChoice { delta1, delta2 }
        .validated(&ProblemSpec::new(n, k, ProblemCase::TwoChoice)?)?;
    let Policy::TwoChoice { delta1, delta2 } = policy else { unreachable!() };
    Ok(TwoChoiceProfile::build(n, k).first_threshold(delta1).win_probability(delta2))
}

/// Same value as [`win_probability`], with the last part summed pair by pair
/// over (first pick, position of the best) through [`g_gap`]. Quadratic in
/// `n`; kept as an independent check.
pub fn win_probability_by_gaps(n: usize, k: usize, delta1: usize, delta2: usize) -> Result<f64> {
    let policy = Policy::TwoChoice { delta1, delta2 }
        .validated(&ProblemSpec::new(n, k, ProblemCase::TwoChoice)?)?;
    let Policy::TwoChoice { delta1, delta2 } = policy else { unreachable!() };
    let profile = TwoChoiceProfile::build(n, k);
    let state = profile.first_threshold(delta1);
    let [s1, s2, _] = state.sigmas(delta2);
    let inv_n = 1.0 / n as f64;
    let mut s3 = 0.0;
    for m in (delta1 + 1).max((delta2 + 2).saturating_sub(k))..=n {
        let second = StopProfile::new(n, k, m + k - 1);
        let c = stop_at(&state.first, n, k, m, delta1);
        for j in m + k..=n {
            s3 += inv_n * c * (1.0 - second.before(j - k));
        }
    }
    Ok(s1 + s2 + s3)
}

/// Limiting win probability for `w = k/n`, `rho_i = delta_i/n`, evaluated at
/// `n = N_EFF`. `w = 0` uses `k = 1`.
///
/// When `rho1 + w < 1` the second threshold must satisfy `rho2 >= rho1 + w`;
/// otherwise `rho2` is ignored, as no second pick is possible.
pub fn asymptotic_win_probability(w: f64, rho1: f64, rho2: f64) -> Result<f64> {
    asymptotic_win_probability_at(w, rho1, rho2, N_EFF)
}

pub fn asymptotic_win_probability_at(w: f64, rho1: f64, rho2: f64, n_eff: usize) -> Result<f64> {
    let (k, delta1, delta2) = normalized_pair(w, rho1, rho2, n_eff)?;
    Ok(TwoChoiceProfile::build(n_eff, k).first_threshold(delta1).win_probability(delta2))
}

pub(crate) fn normalized_pair(
    w: f64,
    rho1: f64,
    rho2: f64,
    n_eff: usize,
) -> Result<(usize, usize, usize)> {
    let as_input = |e: Error| match e {
        Error::Domain(msg) => Error::InvalidInput(msg),
        other => other,
    };
    let k = normalized_window(w, n_eff).map_err(as_input)?;
    let delta1 = normalized_threshold(rho1, n_eff).map_err(as_input)?;
    let last = n_eff - 1;
    if delta1 + k > last {
        return Ok((k, delta1, last));
    }
    if rho2 < rho1 + w - 1e-9 || rho2 >= 1.0 {
        return Err(Error::input(format!(
            "need rho1 + w <= rho2 < 1, got rho1={rho1}, w={w}, rho2={rho2}"
        )));
    }
    let delta2 = normalized_threshold(rho2, n_eff).map_err(as_input)?;
    Ok((k, delta1, delta2.clamp(delta1 + k, last)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::best1;
    use approx::assert_abs_diff_eq;

    #[test]
    fn f2_base_cases() {
        assert_eq!(f2(10, 3, 4, 4).unwrap(), 0.0);
        assert_abs_diff_eq!(f2(10, 3, 0, 1).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        for n in 1..=8 {
            for k in 1..=n {
                for d in 0..n {
                    for a in 0..=n {
                        assert_eq!(f2(n, k, d, a).unwrap(), best1::f_rec(n, k, d, a).unwrap());
                    }
                }
            }
        }
        assert!(f2(10, 3, 0, 11).is_err());
    }

    #[test]
    fn c_stop_values() {
        assert_eq!(c_stop(10, 3, 2, 2).unwrap(), 0.0);
        assert_abs_diff_eq!(c_stop(10, 3, 1, 0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        for x in 0..12 {
            let total: f64 = (x + 1..=12).map(|m| c_stop(12, 4, m, x).unwrap()).sum();
            assert!(total <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn g_gap_edges() {
        assert_eq!(g_gap(10, 3, 2, 0, 4).unwrap(), 0.0);
        // Nothing lies strictly between the block of m and b - k.
        assert_eq!(g_gap(10, 3, 2, 0, 5).unwrap(), c_stop(10, 3, 2, 0).unwrap());
        let g = g_gap(10, 3, 2, 0, 8).unwrap();
        assert!(g < c_stop(10, 3, 2, 0).unwrap());
        assert!(g_gap(10, 3, 2, 2, 8).is_err());
    }

    #[test]
    fn certainty_for_half_window() {
        assert_abs_diff_eq!(win_probability(10, 5, 0, 5).unwrap(), 1.0, epsilon = 1e-12);
        for n in 2usize..=20 {
            for k in n.div_ceil(2)..=n {
                let delta2 = k.min(n - 1);
                assert_eq!(win_probability(n, k, 0, delta2).unwrap(), 1.0);
                let sum: f64 = TwoChoiceProfile::build(n, k).first_threshold(0).sigmas(delta2).iter().sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(win_probability_by_gaps(n, k, 0, delta2).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gap_route_agrees() {
        for n in 2..=14 {
            for k in 1..=n {
                for delta1 in 0..n {
                    let lo = if delta1 + k > n - 1 { n - 1 } else { delta1 + k };
                    for delta2 in lo..n {
                        assert_abs_diff_eq!(
                            win_probability(n, k, delta1, delta2).unwrap(),
                            win_probability_by_gaps(n, k, delta1, delta2).unwrap(),
                            epsilon = 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn classical_two_choice_limit() {
        let n = 10_000;
        let e = std::f64::consts::E;
        let d1 = (n as f64 / e.powf(1.5)).round() as usize;
        let d2 = (n as f64 / e).round() as usize;
        let p = win_probability(n, 1, d1, d2).unwrap();
        assert_abs_diff_eq!(p, (-1.0f64).exp() + (-1.5f64).exp(), epsilon = 1e-3);
    }

    #[test]
    fn asymptotic_domain() {
        assert_abs_diff_eq!(asymptotic_win_probability(0.5, 0.0, 0.5).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(asymptotic_win_probability(0.7, 0.4, 0.0).unwrap(),
            asymptotic_win_probability(0.7, 0.4, 0.99).unwrap(), epsilon = 1e-15);
        assert!(asymptotic_win_probability(0.2, 0.3, 0.4).is_err());
        assert!(asymptotic_win_probability(1.2, 0.0, 0.0).is_err());
    }
}
