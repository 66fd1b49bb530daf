//! Best-2 case: win by accepting the best or the second-best applicant.
//!
//! The policy accepts the first 1-candidate after `d1`, or the first
//! 2-candidate after `d2` whose better rival has already been interviewed.
//! Three stopping tables drive the recursion, all cumulative in the position:
//!
//! - `H`: stopping at a 2-candidate, conditioned on the best applicant seen
//!   lying in `1..=d1` (then no 1-candidate can ever show up). With `d1 = 0`
//!   the condition is impossible and the table is left at zero.
//! - `G`: the joint probability of stopping at a 2-candidate while the best
//!   applicant seen lies in `1..=d1`.
//! - `F`: stopping at a 1-candidate.
//!
//! `c(i)` is the `H` mass up to `i - k` and `t(i)` the `F + G` mass up to
//! `i - k`; positions within `k` of `i` cannot have triggered a stop yet.
//!
//! The win probability splits into three parts:
//!
//! - `sigma1`: a 2-candidate at `i` is the second-best overall and the best
//!   sits in `1..=d1`. Weight `d1 / (n (n - 1))`.
//! - `sigma2`: a 1-candidate at `i` is the second-best overall, the best being
//!   outside the `s_i` positions seen. Weight `(n - s_i) / (n (n - 1))`.
//! - `sigma3`: a 1-candidate at `i` is the best overall. Weight `1 / n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::best1::{normalized_threshold, normalized_window};
use crate::model::check_window;
use crate::{seen_len, Error, Result, N_EFF};

/// Which stopping table [`hgf_rec`] reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Table {
    H,
    G,
    F,
}

/// Stopping and win tables for one `(n, k, d1, d2)`.
#[derive(Debug, Clone)]
pub struct Best2Recursion {
    n: usize,
    k: usize,
    d1: usize,
    d2: usize,
    h_cum: Vec<f64>,
    g_cum: Vec<f64>,
    f_cum: Vec<f64>,
    sigma1: Vec<f64>,
    sigma2: Vec<f64>,
    sigma3: Vec<f64>,
}

impl Best2Recursion {
    pub fn new(n: usize, k: usize, d1: usize, d2: usize) -> Result<Self> {
        check_thresholds(n, k, d1, d2)?;
        Ok(Self::build(n, k, d1, d2))
    }

    fn build(n: usize, k: usize, d1: usize, d2: usize) -> Self {
        let mut rec = Best2Recursion {
            n,
            k,
            d1,
            d2,
            h_cum: vec![0.0; n + 1],
            g_cum: vec![0.0; n + 1],
            f_cum: vec![0.0; n + 1],
            sigma1: vec![0.0; n + 1],
            sigma2: vec![0.0; n + 1],
            sigma3: vec![0.0; n + 1],
        };
        if n == 1 {
            // A lone applicant is always a 1-candidate and always the best.
            rec.f_cum[1] = 1.0;
            rec.sigma3[1] = 1.0;
            return rec;
        }
        let nf = n as f64;
        let pair = nf * (nf - 1.0);
        let d1f = d1 as f64;
        for i in 1..=n {
            let s = seen_len(i, k, n);
            let sf = s as f64;
            let (mut h, mut g, mut f) = (0.0, 0.0, 0.0);
            let (mut w1, mut w2, mut w3) = (0.0, 0.0, 0.0);
            if i > d2 && s > 1 && d1 > 0 {
                let c = rec.c(i);
                h = (1.0 - c) / (sf - 1.0);
                g = d1f / sf * h;
                w1 = d1f / pair * (1.0 - c);
            }
            if i > d1 {
                let t = rec.t(i);
                f = (1.0 - t) / sf;
                w2 = (nf - sf) / pair * (1.0 - t);
                w3 = (1.0 - t) / nf;
            }
            rec.h_cum[i] = rec.h_cum[i - 1] + h;
            rec.g_cum[i] = rec.g_cum[i - 1] + g;
            rec.f_cum[i] = rec.f_cum[i - 1] + f;
            rec.sigma1[i] = rec.sigma1[i - 1] + w1;
            rec.sigma2[i] = rec.sigma2[i - 1] + w2;
            rec.sigma3[i] = rec.sigma3[i - 1] + w3;
        }
        rec
    }

    fn anchor(&self, which: Table) -> usize {
        match which {
            Table::H | Table::G => self.d2,
            Table::F => self.d1,
        }
    }

    fn cumulative(&self, which: Table) -> &[f64] {
        match which {
            Table::H => &self.h_cum,
            Table::G => &self.g_cum,
            Table::F => &self.f_cum,
        }
    }

    /// Block-local value of a stopping table: the mass accumulated since the
    /// start of the block of `k` positions (counted from the table's
    /// threshold) that contains `a`.
    pub fn local(&self, which: Table, a: usize) -> f64 {
        let anchor = self.anchor(which);
        let a = a.min(self.n);
        if a <= anchor {
            return 0.0;
        }
        let q = (a - anchor).div_ceil(self.k);
        let cum = self.cumulative(which);
        cum[a] - cum[anchor + (q - 1) * self.k]
    }

    /// Cumulative mass of a stopping table over positions `1..=a`.
    pub fn cumulative_at(&self, which: Table, a: usize) -> f64 {
        self.cumulative(which)[a.min(self.n)]
    }

    /// `H` mass that can already have stopped the search before `i`.
    pub fn c(&self, i: usize) -> f64 {
        i.checked_sub(self.k).map_or(0.0, |a| self.h_cum[a.min(self.n)])
    }

    /// `F + G` mass that can already have stopped the search before `i`.
    pub fn t(&self, i: usize) -> f64 {
        i.checked_sub(self.k)
            .map_or(0.0, |a| self.f_cum[a.min(self.n)] + self.g_cum[a.min(self.n)])
    }

    pub fn sigmas(&self, a: usize) -> [f64; 3] {
        let a = a.min(self.n);
        [self.sigma1[a], self.sigma2[a], self.sigma3[a]]
    }

    pub fn win_probability(&self) -> f64 {
        self.sigmas(self.n).iter().sum()
    }
}

fn check_thresholds(n: usize, k: usize, d1: usize, d2: usize) -> Result<()> {
    check_window(n, k)?;
    if d1 > d2 || d2 >= n {
        return Err(Error::input(format!(
            "thresholds must satisfy d1 <= d2 <= n-1, got ({d1}, {d2}) with n={n}"
        )));
    }
    Ok(())
}

/// Block-local value of the `H`, `G` or `F` table at position `a`.
pub fn hgf_rec(n: usize, k: usize, d1: usize, d2: usize, which: Table, a: usize) -> Result<f64> {
    let rec = Best2Recursion::new(n, k, d1, d2)?;
    if a > n {
        return Err(Error::input(format!("position a={a} exceeds n={n}")));
    }
    Ok(rec.local(which, a))
}

/// Exact probability of ending with the best or second-best applicant.
pub fn win_probability(n: usize, k: usize, d1: usize, d2: usize) -> Result<f64> {
    Ok(Best2Recursion::new(n, k, d1, d2)?.win_probability())
}

/// Loss probabilities at `k = n - 2` for the four threshold pairs that can be
/// optimal there. The key `(0, 0)` stands for any pair with `d1 = 0`, since
/// every position is then covered by the 1-candidate rule.
pub fn near_full_window_losses(n: usize) -> Result<BTreeMap<(usize, usize), f64>> {
    if n < 5 {
        return Err(Error::domain(format!("near-full window losses need n >= 5, got {n}")));
    }
    let nf = n as f64;
    let triple = 2.0 / (nf * (nf - 1.0) * (nf - 2.0));
    let pair = 1.0 / (nf * (nf - 1.0));
    Ok(BTreeMap::from([
        ((0, 0), triple),
        ((1, 1), triple),
        ((1, 2), pair),
        ((2, 2), 2.0 * pair),
    ]))
}

/// Window size above which the optimal `d2` is 1.
pub fn d2_unit_boundary(n: usize) -> f64 {
    let m = n.saturating_sub(1) as f64;
    ((8.0 * m * m + 1.0).sqrt() + 1.0) / 4.0
}

/// Limiting win probability for `w = k/n`, `rho1 = d1/n`, `rho2 = d2/n`,
/// evaluated with the exact recursion at `n = N_EFF`. `w = 0` uses `k = 1`.
pub fn asymptotic_win_probability(w: f64, rho1: f64, rho2: f64) -> Result<f64> {
    asymptotic_win_probability_at(w, rho1, rho2, N_EFF)
}

pub fn asymptotic_win_probability_at(w: f64, rho1: f64, rho2: f64, n_eff: usize) -> Result<f64> {
    if rho1 > rho2 {
        return Err(Error::input(format!("need rho1 <= rho2, got {rho1} > {rho2}")));
    }
    let k = normalized_window(w, n_eff).map_err(as_input)?;
    let d1 = normalized_threshold(rho1, n_eff).map_err(as_input)?;
    let d2 = normalized_threshold(rho2, n_eff).map_err(as_input)?;
    Ok(Best2Recursion::build(n_eff, k, d1, d2.max(d1)).win_probability())
}

fn as_input(e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::InvalidInput(msg),
        other => other,
    }
}
