//! Threshold search for finite `n` and for the normalized limit.
//!
//! Finite problems are scanned exhaustively and every maximizer is reported.
//! Normalized curves assume the win probability is unimodal in each
//! threshold: a coarse grid (step 0.01) picks the starting bracket and
//! golden-section search narrows it down to 1e-4.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::best1::{normalized_window, tail_chain};
use crate::best2::Best2Recursion;
use crate::model::check_window;
use crate::twochoice::TwoChoiceProfile;
use crate::{scaled, Error, Policy, ProblemCase, ProblemSpec, Result, N_EFF};

/// Two win probabilities closer than this count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Step of the coarse threshold grid for normalized curves.
pub const COARSE_STEP: f64 = 0.01;

/// Width of the final bracket for normalized thresholds.
pub const THRESHOLD_RESOLUTION: f64 = 1e-4;

/// Largest `n` accepted by [`monotonicity_report`].
pub const MAX_REPORT_N: usize = 30;

/// Every maximizing policy for one problem, in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalResult {
    pub spec: ProblemSpec,
    pub best_policies: Vec<Policy>,
    pub p_win: f64,
}

impl OptimalResult {
    fn from_scan(spec: ProblemSpec, scan: Vec<(Policy, f64)>) -> Self {
        let p_win = scan.iter().map(|&(_, p)| p).fold(f64::NEG_INFINITY, f64::max);
        let mut best_policies: Vec<Policy> = scan
            .into_iter()
            .filter(|&(_, p)| p_win - p <= TIE_TOLERANCE)
            .map(|(pol, _)| pol)
            .collect();
        best_policies.sort();
        OptimalResult { spec, best_policies, p_win }
    }

    /// Lexicographically smallest maximizer.
    pub fn first(&self) -> &Policy {
        &self.best_policies[0]
    }
}

pub fn optimal(spec: &ProblemSpec) -> Result<OptimalResult> {
    match spec.case {
        ProblemCase::Best1 => optimal_best1(spec.n, spec.k),
        ProblemCase::Best2 => optimal_best2(spec.n, spec.k),
        ProblemCase::TwoChoice => optimal_twochoice(spec.n, spec.k),
    }
}

/// Scans `d = 0..n-1`.
pub fn optimal_best1(n: usize, k: usize) -> Result<OptimalResult> {
    let spec = ProblemSpec::new(n, k, ProblemCase::Best1)?;
    let tail = tail_chain(n, k);
    let scan = (0..n).map(|d| (Policy::Best1 { d }, tail[d])).collect();
    Ok(OptimalResult::from_scan(spec, scan))
}

/// Scans `0 <= d1 <= d2 <= n-1`.
pub fn optimal_best2(n: usize, k: usize) -> Result<OptimalResult> {
    let spec = ProblemSpec::new(n, k, ProblemCase::Best2)?;
    let scan = (0..n)
        .into_par_iter()
        .flat_map_iter(|d1| {
            (d1..n).map(move |d2| {
                let p = Best2Recursion::new(n, k, d1, d2).map(|r| r.win_probability());
                (Policy::Best2 { d1, d2 }, p.expect("thresholds are in range"))
            })
        })
        .collect();
    Ok(OptimalResult::from_scan(spec, scan))
}

/// Scans every feasible `(delta1, delta2)`.
pub fn optimal_twochoice(n: usize, k: usize) -> Result<OptimalResult> {
    let spec = ProblemSpec::new(n, k, ProblemCase::TwoChoice)?;
    let profile = TwoChoiceProfile::new(n, k)?;
    let scan = (0..n)
        .into_par_iter()
        .flat_map_iter(|delta1| {
            let state = profile.first_threshold(delta1);
            feasible_second(n, k, delta1)
                .map(|delta2| (Policy::TwoChoice { delta1, delta2 }, state.win_probability(delta2)))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(OptimalResult::from_scan(spec, scan))
}

fn feasible_second(n: usize, k: usize, delta1: usize) -> std::ops::RangeInclusive<usize> {
    if delta1 + k > n - 1 {
        n - 1..=n - 1
    } else {
        delta1 + k..=n - 1
    }
}

/// Optimum of the normalized problem at one window fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub w: f64,
    pub rho_star: Vec<f64>,
    pub p_win: f64,
}

/// Optimal normalized thresholds for each `w`, evaluated at `n = N_EFF`.
///
/// `w = 0` stands for the classical limit (`k = 1`).
pub fn asymptotic_curve(case: ProblemCase, w_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    asymptotic_curve_at(case, w_grid, N_EFF)
}

pub fn asymptotic_curve_at(case: ProblemCase, w_grid: &[f64], n_eff: usize) -> Result<Vec<CurvePoint>> {
    if w_grid.is_empty() {
        return Err(Error::input("w grid is empty"));
    }
    for &w in w_grid {
        normalized_window(w, n_eff).map_err(|e| Error::input(e.to_string()))?;
    }
    w_grid
        .par_iter()
        .map(|&w| match case {
            ProblemCase::Best1 => Ok(best1_point(w, n_eff)),
            ProblemCase::Best2 => Ok(best2_point(w, n_eff)),
            ProblemCase::TwoChoice => Ok(twochoice_point(w, n_eff)),
        })
        .collect()
}

/// Largest normalized threshold that still maps to a valid integer threshold.
fn rho_cap(n: usize) -> f64 {
    (n - 1) as f64 / n as f64
}

fn coarse_grid(hi: f64) -> impl Iterator<Item = f64> + Clone {
    (0..).map(|i| i as f64 * COARSE_STEP).take_while(move |&r| r <= hi + 1e-12)
}

/// Maximizes `f` over `[lo, hi]` by golden-section search; returns the best
/// point probed, so the result is never worse than the bracket ends.
fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = [(a, f(a)), (b, f(b))]
        .into_iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("two probes");
    let keep = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx > best.1 || (fx == best.1 && x < best.0) {
            *best = (x, fx);
        }
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    keep(c, fc, &mut best);
    keep(d, fd, &mut best);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            keep(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            keep(d, fd, &mut best);
        }
    }
    best
}

fn best1_point(w: f64, n: usize) -> CurvePoint {
    let k = normalized_window(w, n).expect("validated");
    let tail = tail_chain(n, k);
    let cap = rho_cap(n);
    let value = |rho: f64| tail[scaled(rho.clamp(0.0, cap), n).min(n - 1)];
    let (coarse, _) = coarse_grid(cap)
        .map(|r| (r, value(r)))
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let lo = (coarse - COARSE_STEP).max(0.0);
    let hi = (coarse + COARSE_STEP).min(cap);
    let (rho, p_win) = golden_max(value, lo, hi, THRESHOLD_RESOLUTION);
    CurvePoint { w, rho_star: vec![rho], p_win }
}

fn best2_point(w: f64, n: usize) -> CurvePoint {
    let k = normalized_window(w, n).expect("validated");
    let eval = |n: usize, k: usize, r1: f64, r2: f64| {
        let cap = rho_cap(n);
        let d1 = scaled(r1.clamp(0.0, cap), n).min(n - 1);
        let d2 = scaled(r2.clamp(0.0, cap), n).min(n - 1).max(d1);
        Best2Recursion::new(n, k, d1, d2).expect("thresholds are in range").win_probability()
    };
    // The coarse pass runs on a smaller population with the same window fraction.
    let n_coarse = n.min(10_000);
    let k_coarse = normalized_window(w, n_coarse).expect("validated");
    let cap = rho_cap(n);
    let pairs: Vec<(f64, f64)> = coarse_grid(cap)
        .flat_map(|r1| coarse_grid(cap).filter(move |&r2| r2 >= r1).map(move |r2| (r1, r2)))
        .collect();
    let (c1, c2, _) = pairs
        .par_iter()
        .map(|&(r1, r2)| (r1, r2, eval(n_coarse, k_coarse, r1, r2)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0, f64::NEG_INFINITY), |acc, x| if x.2 > acc.2 { x } else { acc });
    let span = 2.0 * COARSE_STEP;
    let inner = |r1: f64| {
        let lo = (c2 - span).max(r1);
        let hi = (c2 + span).min(cap).max(lo);
        golden_max(|r2| eval(n, k, r1, r2), lo, hi, THRESHOLD_RESOLUTION)
    };
    let (r1, p_win) =
        golden_max(|r1| inner(r1).1, (c1 - span).max(0.0), (c1 + span).min(cap), THRESHOLD_RESOLUTION);
    let (r2, _) = inner(r1);
    CurvePoint { w, rho_star: vec![r1, r2], p_win }
}

fn twochoice_point(w: f64, n: usize) -> CurvePoint {
    let k = normalized_window(w, n).expect("validated");
    let profile = TwoChoiceProfile::new(n, k).expect("validated");
    let cap = rho_cap(n);
    // For a fixed first threshold the best second threshold is found exactly.
    let best_second = |r1: f64| {
        let delta1 = scaled(r1.clamp(0.0, cap), n).min(n - 1);
        let state = profile.first_threshold(delta1);
        feasible_second(n, k, delta1)
            .map(|delta2| (delta2, state.win_probability(delta2)))
            .fold((n - 1, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
    };
    let (coarse, _) = coarse_grid(cap)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&r| (r, best_second(r).1))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let lo = (coarse - COARSE_STEP).max(0.0);
    let hi = (coarse + COARSE_STEP).min(cap);
    let (r1, p_win) = golden_max(|r| best_second(r).1, lo, hi, THRESHOLD_RESOLUTION);
    let (delta2, _) = best_second(r1);
    CurvePoint { w, rho_star: vec![r1, delta2 as f64 / n as f64], p_win }
}

/// Optimum for one window size within a [`MonotonicityReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityRow {
    pub k: usize,
    pub p_win: f64,
    /// Smallest value of each threshold over all maximizers.
    pub smallest_thresholds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub case: ProblemCase,
    pub n: usize,
    pub rows: Vec<MonotonicityRow>,
    /// One message per window size that breaks a claim.
    pub violations: Vec<String>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tabulates the optimum for `k = 1..=n` and checks that the optimal win
/// probability strictly increases in `k` until it reaches 1, and that the
/// smallest optimal thresholds never increase with `k`.
///
/// The 2-Choice check only tracks the first threshold; the second one is tied
/// to the window size.
pub fn monotonicity_report(case: ProblemCase, n: usize) -> Result<MonotonicityReport> {
    check_window(n, 1)?;
    if n > MAX_REPORT_N {
        return Err(Error::Resource(format!("monotonicity scans are capped at n={MAX_REPORT_N}")));
    }
    let rows = (1..=n)
        .map(|k| {
            let opt = optimal(&ProblemSpec::new(n, k, case)?)?;
            let width = if case == ProblemCase::TwoChoice { 1 } else { opt.first().thresholds().len() };
            let smallest_thresholds = (0..width)
                .map(|j| opt.best_policies.iter().map(|p| p.thresholds()[j]).min().expect("nonempty"))
                .collect();
            Ok(MonotonicityRow { k, p_win: opt.p_win, smallest_thresholds })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    for pair in rows.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        let saturated = prev.p_win >= 1.0 - TIE_TOLERANCE;
        if saturated {
            if cur.p_win < 1.0 - TIE_TOLERANCE {
                violations.push(format!("k={}: p={} drops below 1 after saturation", cur.k, cur.p_win));
            }
        } else if cur.p_win <= prev.p_win + TIE_TOLERANCE {
            violations.push(format!(
                "k={}: p={} does not exceed p={} at k={}",
                cur.k, cur.p_win, prev.p_win, prev.k
            ));
        }
        for (j, (a, b)) in prev.smallest_thresholds.iter().zip(&cur.smallest_thresholds).enumerate() {
            if b > a {
                violations.push(format!(
                    "k={}: smallest threshold #{} rises from {a} to {b}",
                    cur.k,
                    j + 1
                ));
            }
        }
    }
    Ok(MonotonicityReport { case, n, rows, violations })
}
