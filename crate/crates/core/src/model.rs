//! Problem model and the sliding-rule policy engine.
//!
//! Positions are 1-based throughout the public API. When the window starts at
//! position `i` the interviewer has seen positions `1..=min(i + k - 1, n)`;
//! past `n - k + 1` the seen set is the whole population.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{seen_len, Error, Result};

/// Payoff regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemCase {
    /// Win by accepting the overall best applicant.
    Best1,
    /// Win by accepting the best or the second best applicant.
    Best2,
    /// Two acceptances; win if either is the overall best.
    TwoChoice,
}

impl ProblemCase {
    pub const ALL: [ProblemCase; 3] = [ProblemCase::Best1, ProblemCase::Best2, ProblemCase::TwoChoice];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemCase::Best1 => "best1",
            ProblemCase::Best2 => "best2",
            ProblemCase::TwoChoice => "twochoice",
        }
    }
}

impl fmt::Display for ProblemCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "best1" => Ok(ProblemCase::Best1),
            "best2" => Ok(ProblemCase::Best2),
            "twochoice" | "2choice" => Ok(ProblemCase::TwoChoice),
            other => Err(Error::input(format!("unknown case `{other}`"))),
        }
    }
}

/// Population size, window size and payoff regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub n: usize,
    pub k: usize,
    pub case: ProblemCase,
}

impl ProblemSpec {
    pub fn new(n: usize, k: usize, case: ProblemCase) -> Result<Self> {
        check_window(n, k)?;
        Ok(ProblemSpec { n, k, case })
    }
}

pub(crate) fn check_window(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::input("n must be at least 1"));
    }
    if k == 0 || k > n {
        return Err(Error::input(format!("window k={k} must satisfy 1 <= k <= n={n}")));
    }
    Ok(())
}

/// Absolute ranks by interview position; rank 1 is the best applicant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankSequence {
    ranks: Vec<usize>,
}

impl RankSequence {
    /// Validates that `ranks` is a permutation of `1..=ranks.len()`.
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        if n == 0 {
            return Err(Error::input("rank sequence is empty"));
        }
        let mut seen = vec![false; n + 1];
        for &r in &ranks {
            if r == 0 || r > n || seen[r] {
                return Err(Error::input(format!("{ranks:?} is not a permutation of 1..={n}")));
            }
            seen[r] = true;
        }
        Ok(RankSequence { ranks })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Rank of the applicant at 1-based position `i`.
    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i - 1]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
}

/// Threshold parameters of a strategy.
///
/// A threshold `t` means the first `t` positions are never accepted for the
/// corresponding role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum Policy {
    /// Accept the first 1-candidate after `d`.
    Best1 { d: usize },
    /// Accept the first 1-candidate after `d1`, or the first 2-candidate after `d2`.
    Best2 { d1: usize, d2: usize },
    /// First pick: first candidate after `delta1`. Second pick: first candidate
    /// after both the first pick and `delta2`.
    #[serde(rename = "twochoice")]
    TwoChoice { delta1: usize, delta2: usize },
}

impl Policy {
    pub fn case(&self) -> ProblemCase {
        match self {
            Policy::Best1 { .. } => ProblemCase::Best1,
            Policy::Best2 { .. } => ProblemCase::Best2,
            Policy::TwoChoice { .. } => ProblemCase::TwoChoice,
        }
    }

    pub fn thresholds(&self) -> Vec<usize> {
        match *self {
            Policy::Best1 { d } => vec![d],
            Policy::Best2 { d1, d2 } => vec![d1, d2],
            Policy::TwoChoice { delta1, delta2 } => vec![delta1, delta2],
        }
    }

    /// Builds a policy from a threshold list (one value for Best-1, two otherwise).
    pub fn from_thresholds(case: ProblemCase, thresholds: &[usize]) -> Result<Self> {
        match (case, thresholds) {
            (ProblemCase::Best1, &[d]) => Ok(Policy::Best1 { d }),
            (ProblemCase::Best2, &[d1, d2]) => Ok(Policy::Best2 { d1, d2 }),
            (ProblemCase::TwoChoice, &[delta1, delta2]) => Ok(Policy::TwoChoice { delta1, delta2 }),
            (case, t) => Err(Error::input(format!(
                "case {case} takes {} threshold(s), got {}",
                if case == ProblemCase::Best1 { 1 } else { 2 },
                t.len()
            ))),
        }
    }

    /// Checks the policy against `spec` and returns its canonical form.
    ///
    /// For 2-Choice, when `delta1 + k > n - 1` no second pick can ever happen
    /// and `delta2` is clamped to `n - 1`.
    pub fn validated(self, spec: &ProblemSpec) -> Result<Policy> {
        check_window(spec.n, spec.k)?;
        if self.case() != spec.case {
            return Err(Error::input(format!(
                "policy for {} does not match problem case {}",
                self.case(),
                spec.case
            )));
        }
        let last = spec.n - 1;
        match self {
            Policy::Best1 { d } => {
                if d > last {
                    return Err(Error::input(format!("threshold d={d} exceeds n-1={last}")));
                }
                Ok(self)
            }
            Policy::Best2 { d1, d2 } => {
                if d1 > d2 || d2 > last {
                    return Err(Error::input(format!(
                        "thresholds must satisfy d1 <= d2 <= n-1, got ({d1}, {d2}) with n={}",
                        spec.n
                    )));
                }
                Ok(self)
            }
            Policy::TwoChoice { delta1, delta2 } => {
                if delta1 > last {
                    return Err(Error::input(format!("threshold delta1={delta1} exceeds n-1={last}")));
                }
                if delta1 + spec.k > last {
                    return Ok(Policy::TwoChoice { delta1, delta2: last });
                }
                if delta2 < delta1 + spec.k || delta2 > last {
                    return Err(Error::input(format!(
                        "delta2 must lie in [delta1+k, n-1] = [{}, {last}], got {delta2}",
                        delta1 + spec.k
                    )));
                }
                Ok(self)
            }
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Policy::Best1 { d } => write!(f, "{d}"),
            Policy::Best2 { d1, d2 } => write!(f, "{d1}:{d2}"),
            Policy::TwoChoice { delta1, delta2 } => write!(f, "{delta1}:{delta2}"),
        }
    }
}

/// Result of running a policy on one rank sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// Accepted positions (1-based), strictly increasing.
    pub chosen: Vec<usize>,
    pub win: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateClass {
    NotCandidate,
    /// Best among all applicants seen.
    Candidate1,
    /// Second best among all applicants seen (Best-2 only).
    Candidate2,
}

/// Classifies the applicant at position `i` by its relative rank among the
/// applicants seen while the window starts at `i`.
pub fn classify_candidate(
    seq: &RankSequence,
    i: usize,
    k: usize,
    case: ProblemCase,
) -> Result<CandidateClass> {
    let n = seq.len();
    check_window(n, k)?;
    if i == 0 || i > n {
        return Err(Error::input(format!("index {i} outside 1..={n}")));
    }
    let r = seq.rank(i);
    let better = seq.ranks()[..seen_len(i, k, n)].iter().filter(|&&x| x < r).count();
    Ok(match better {
        0 => CandidateClass::Candidate1,
        1 if case == ProblemCase::Best2 => CandidateClass::Candidate2,
        _ => CandidateClass::NotCandidate,
    })
}

/// Runs `policy` on `seq` with the sliding rule.
///
/// A Best-2 policy takes a 2-candidate only when the best applicant seen so
/// far lies before it; otherwise that best applicant is still in the window
/// and the window slides on towards it.
pub fn run_policy(seq: &RankSequence, spec: &ProblemSpec, policy: &Policy) -> Result<Outcome> {
    if seq.len() != spec.n {
        return Err(Error::input(format!(
            "sequence has {} applicants, spec expects {}",
            seq.len(),
            spec.n
        )));
    }
    let policy = policy.validated(spec)?;
    let picks = play(seq.ranks(), spec.k, &policy);
    let chosen = [picks.first, picks.second].into_iter().flatten().collect();
    Ok(Outcome { chosen, win: picks.win })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Picks {
    pub first: Option<usize>,
    pub second: Option<usize>,
    pub win: bool,
}

/// Unchecked policy engine shared by [`run_policy`], the oracle and the
/// simulator. `ranks` must be a permutation of `1..=ranks.len()`.
pub(crate) fn play(ranks: &[usize], k: usize, policy: &Policy) -> Picks {
    let n = ranks.len();
    // Best and second best among positions 1..=seen, as (rank, position).
    let mut best = (usize::MAX, 0usize);
    let mut second = (usize::MAX, 0usize);
    let mut seen = 0usize;
    let mut first: Option<usize> = None;

    for i in 1..=n {
        let upto = seen_len(i, k, n);
        while seen < upto {
            seen += 1;
            let r = ranks[seen - 1];
            if r < best.0 {
                second = best;
                best = (r, seen);
            } else if r < second.0 {
                second = (r, seen);
            }
        }
        let r = ranks[i - 1];
        let is_first_class = r == best.0;
        match *policy {
            Policy::Best1 { d } => {
                if is_first_class && i > d {
                    return Picks { first: Some(i), second: None, win: r == 1 };
                }
            }
            Policy::Best2 { d1, d2 } => {
                let accept = (is_first_class && i > d1)
                    || (r == second.0 && best.1 < i && i > d2);
                if accept {
                    return Picks { first: Some(i), second: None, win: r <= 2 };
                }
            }
            Policy::TwoChoice { delta1, delta2 } => {
                if !is_first_class {
                    continue;
                }
                match first {
                    None if i > delta1 => first = Some(i),
                    Some(m1) if i > m1.max(delta2) => {
                        let win = ranks[m1 - 1] == 1 || r == 1;
                        return Picks { first: Some(m1), second: Some(i), win };
                    }
                    _ => {}
                }
            }
        }
    }
    let win = first.is_some_and(|m1| ranks[m1 - 1] == 1);
    Picks { first, second: None, win }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(r: &[usize]) -> RankSequence {
        RankSequence::new(r.to_vec()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let s = seq(&[1, 2, 3]);
        assert_eq!(classify_candidate(&s, 1, 1, ProblemCase::Best1).unwrap(), CandidateClass::Candidate1);
        let s = seq(&[2, 1, 3]);
        assert_eq!(classify_candidate(&s, 1, 2, ProblemCase::Best1).unwrap(), CandidateClass::NotCandidate);
        assert_eq!(classify_candidate(&s, 1, 2, ProblemCase::Best2).unwrap(), CandidateClass::Candidate2);
        assert_eq!(classify_candidate(&s, 1, 2, ProblemCase::TwoChoice).unwrap(), CandidateClass::NotCandidate);
    }

    #[test]
    fn classify_rejects_bad_index() {
        let s = seq(&[2, 1, 3]);
        assert!(matches!(classify_candidate(&s, 0, 1, ProblemCase::Best1), Err(Error::InvalidInput(_))));
        assert!(matches!(classify_candidate(&s, 4, 1, ProblemCase::Best1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn run_policy_examples() {
        let spec = ProblemSpec::new(2, 1, ProblemCase::Best1).unwrap();
        let out = run_policy(&seq(&[2, 1]), &spec, &Policy::Best1 { d: 0 }).unwrap();
        assert_eq!(out, Outcome { chosen: vec![1], win: false });

        let spec = ProblemSpec::new(3, 1, ProblemCase::Best1).unwrap();
        let out = run_policy(&seq(&[2, 1, 3]), &spec, &Policy::Best1 { d: 1 }).unwrap();
        assert_eq!(out, Outcome { chosen: vec![2], win: true });

        let spec = ProblemSpec::new(3, 2, ProblemCase::Best1).unwrap();
        let out = run_policy(&seq(&[3, 1, 2]), &spec, &Policy::Best1 { d: 0 }).unwrap();
        assert_eq!(out, Outcome { chosen: vec![2], win: true });
    }

    #[test]
    fn malformed_permutations_are_rejected() {
        assert!(RankSequence::new(vec![1, 1, 3]).is_err());
        assert!(RankSequence::new(vec![0, 1]).is_err());
        assert!(RankSequence::new(vec![]).is_err());
        let spec = ProblemSpec::new(3, 1, ProblemCase::Best1).unwrap();
        assert!(run_policy(&seq(&[2, 1]), &spec, &Policy::Best1 { d: 0 }).is_err());
    }

    #[test]
    fn no_acceptance_loses() {
        // Best applicant skipped by the threshold: nothing later is a candidate.
        let spec = ProblemSpec::new(3, 1, ProblemCase::Best1).unwrap();
        let out = run_policy(&seq(&[1, 2, 3]), &spec, &Policy::Best1 { d: 1 }).unwrap();
        assert_eq!(out, Outcome { chosen: vec![], win: false });
    }

    #[test]
    fn best2_waits_for_best_in_window() {
        // Position 1 is second best among seen but the best seen (position 2)
        // is still ahead in the window, so the window slides to it.
        let spec = ProblemSpec::new(3, 2, ProblemCase::Best2).unwrap();
        let out = run_policy(&seq(&[2, 1, 3]), &spec, &Policy::Best2 { d1: 0, d2: 0 }).unwrap();
        assert_eq!(out, Outcome { chosen: vec![2], win: true });
        // With the best passed, a 2-candidate after d2 is taken.
        let out = run_policy(&seq(&[1, 3, 2]), &spec, &Policy::Best2 { d1: 1, d2: 1 }).unwrap();
        assert_eq!(out, Outcome { chosen: vec![3], win: true });
    }

    #[test]
    fn two_choice_picks_twice() {
        let spec = ProblemSpec::new(4, 1, ProblemCase::TwoChoice).unwrap();
        let pol = Policy::TwoChoice { delta1: 0, delta2: 1 };
        let out = run_policy(&seq(&[3, 2, 4, 1]), &spec, &pol).unwrap();
        assert_eq!(out, Outcome { chosen: vec![1, 2], win: false });
        let out = run_policy(&seq(&[1, 2, 4, 3]), &spec, &pol).unwrap();
        assert_eq!(out, Outcome { chosen: vec![1], win: true });
    }

    #[test]
    fn two_choice_clamps_infeasible_second_threshold() {
        let spec = ProblemSpec::new(5, 5, ProblemCase::TwoChoice).unwrap();
        let pol = Policy::TwoChoice { delta1: 0, delta2: 5 }.validated(&spec).unwrap();
        assert_eq!(pol, Policy::TwoChoice { delta1: 0, delta2: 4 });
        let spec = ProblemSpec::new(10, 3, ProblemCase::TwoChoice).unwrap();
        assert!(Policy::TwoChoice { delta1: 2, delta2: 4 }.validated(&spec).is_err());
    }

    #[test]
    fn policy_validation() {
        let spec = ProblemSpec::new(5, 2, ProblemCase::Best2).unwrap();
        assert!(Policy::Best2 { d1: 3, d2: 2 }.validated(&spec).is_err());
        assert!(Policy::Best2 { d1: 2, d2: 5 }.validated(&spec).is_err());
        assert!(Policy::Best1 { d: 1 }.validated(&spec).is_err());
        assert!(ProblemSpec::new(3, 4, ProblemCase::Best1).is_err());
        assert!(ProblemSpec::new(0, 0, ProblemCase::Best1).is_err());
    }

    #[test]
    fn case_parsing() {
        assert_eq!("best1".parse::<ProblemCase>().unwrap(), ProblemCase::Best1);
        assert_eq!("2-choice".parse::<ProblemCase>().unwrap(), ProblemCase::TwoChoice);
        assert_eq!("TwoChoice".parse::<ProblemCase>().unwrap(), ProblemCase::TwoChoice);
        assert!("best3".parse::<ProblemCase>().is_err());
    }
}
