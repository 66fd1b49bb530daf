use proptest::prelude::*;
use slidewin::optimize::{optimal_best1, optimal_best2, optimal_twochoice};
use slidewin::{best1, best2, twochoice, run_policy, Policy, ProblemCase, ProblemSpec, RankSequence};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
}

fn window_and_perm() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (1usize..=12).prop_flat_map(|n| (1..=n, shuffled(n)))
}

proptest! {
    #[test]
    fn k2_closed_form_matches_recursion(n in 4usize..=200, frac in 0.0f64..1.0) {
        let d = 1 + (frac * (n - 3) as f64) as usize;
        prop_assume!(n >= d + 3);
        let a = best1::win_probability_k2(n, d).unwrap();
        let b = best1::win_probability(n, 2, d).unwrap();
        prop_assert!(close(a, b, 1e-10), "n={} d={}: {} vs {}", n, d, a, b);
    }

    #[test]
    fn large_window_sum_matches_recursion(n in 1usize..=500, frac in 0.5f64..=1.0) {
        let k = ((frac * n as f64).ceil() as usize).clamp(1, n);
        prop_assume!(2 * k >= n);
        let a = best1::large_window_exact(n, k).unwrap();
        let b = best1::win_probability(n, k, 0).unwrap();
        prop_assert!(close(a, b, 1e-10), "n={} k={}: {} vs {}", n, k, a, b);
    }

    #[test]
    fn probabilities_are_probabilities(n in 1usize..=60, kf in 0.0f64..1.0, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let k = 1 + (kf * n as f64) as usize % n;
        let d1 = (r1 * n as f64) as usize % n;
        let d2 = d1 + (r2 * (n - d1) as f64) as usize % (n - d1);
        let p = best1::win_probability(n, k, d1).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
        let p = best2::win_probability(n, k, d1, d2).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
        let rec = best2::Best2Recursion::new(n, k, d1, d2).unwrap();
        for a in 0..=n {
            for t in [best2::Table::H, best2::Table::G, best2::Table::F] {
                let v = rec.local(t, a);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
        }
    }

    #[test]
    fn tail_chain_matches_recursion(n in 1usize..=120, kf in 0.0f64..1.0) {
        let k = 1 + (kf * n as f64) as usize % n;
        let tail = best1::tail_win_probabilities(n, k).unwrap();
        for d in (0..n).step_by(1 + n / 10) {
            prop_assert!(close(tail[d], best1::win_probability(n, k, d).unwrap(), 1e-12));
        }
    }

    #[test]
    fn twochoice_stop_mass_is_subprobability(n in 1usize..=60, kf in 0.0f64..1.0, xf in 0.0f64..1.0) {
        let k = 1 + (kf * n as f64) as usize % n;
        let x = (xf * n as f64) as usize;
        let total: f64 = (1..=n).map(|m| twochoice::c_stop(n, k, m, x).unwrap()).sum();
        prop_assert!(total <= 1.0 + 1e-12);
    }

    #[test]
    fn outcomes_respect_case_rules((k, ranks) in window_and_perm(), t1 in 0usize..12, t2 in 0usize..12) {
        let n = ranks.len();
        let seq = RankSequence::new(ranks).unwrap();
        let (a, b) = (t1.min(t2) % n, t1.max(t2) % n);
        let (a, b) = (a.min(b), a.max(b));

        let spec = ProblemSpec::new(n, k, ProblemCase::Best1).unwrap();
        let out = run_policy(&seq, &spec, &Policy::Best1 { d: a }).unwrap();
        prop_assert!(out.chosen.len() <= 1);
        prop_assert_eq!(out.win, out.chosen.first().is_some_and(|&i| seq.rank(i) == 1));

        let spec = ProblemSpec::new(n, k, ProblemCase::Best2).unwrap();
        let out = run_policy(&seq, &spec, &Policy::Best2 { d1: a, d2: b }).unwrap();
        prop_assert!(out.chosen.len() <= 1);
        prop_assert_eq!(out.win, out.chosen.first().is_some_and(|&i| seq.rank(i) <= 2));

        let spec = ProblemSpec::new(n, k, ProblemCase::TwoChoice).unwrap();
        let policy = Policy::TwoChoice { delta1: a, delta2: (a + k).min(n - 1).max(b) }
            .validated(&spec)
            .unwrap();
        let out = run_policy(&seq, &spec, &policy).unwrap();
        prop_assert!(out.chosen.len() <= 2);
        if let [m, j] = out.chosen[..] {
            prop_assert!(j >= m + k);
        }
        prop_assert_eq!(out.win, out.chosen.iter().any(|&i| seq.rank(i) == 1));
    }

    #[test]
    fn full_window_never_loses(ranks in (1usize..=10).prop_flat_map(shuffled)) {
        let n = ranks.len();
        let seq = RankSequence::new(ranks).unwrap();
        let spec = ProblemSpec::new(n, n, ProblemCase::Best1).unwrap();
        let out = run_policy(&seq, &spec, &Policy::Best1 { d: 0 }).unwrap();
        prop_assert!(out.win);
    }
}

#[test]
fn near_full_window_closed_forms() {
    for n in 3..=50 {
        let nf = n as f64;
        assert!(close(best1::win_probability(n, n - 1, 1).unwrap(), 1.0 - 1.0 / nf, 1e-12));
        let expect = 1.0 - 1.0 / (nf * (nf - 1.0));
        assert!(close(best1::win_probability(n, n - 1, 0).unwrap(), expect, 1e-12));
    }
}

#[test]
fn extra_payoff_or_pick_never_hurts() {
    for n in 1..=16 {
        for k in 1..=n {
            let one = optimal_best1(n, k).unwrap().p_win;
            assert!(optimal_twochoice(n, k).unwrap().p_win >= one - 1e-12, "2-choice n={n} k={k}");
            if n <= 12 {
                assert!(optimal_best2(n, k).unwrap().p_win >= one - 1e-12, "best2 n={n} k={k}");
            }
        }
    }
}

#[test]
fn asymptotic_matches_scaled_finite_values() {
    let n = 1000;
    for &(w, r1, r2) in &[(0.2, 0.25, 0.45), (0.1, 0.3, 0.5), (0.35, 0.1, 0.2)] {
        let k = (w * n as f64).round() as usize;
        let (d1, d2) = ((r1 * n as f64) as usize, (r2 * n as f64) as usize);
        let a = best2::asymptotic_win_probability(w, r1, r2).unwrap();
        let b = best2::win_probability(n, k, d1, d2).unwrap();
        assert!(close(a, b, 5e-3), "best2 w={w}: {a} vs {b}");
        let a = twochoice::asymptotic_win_probability(w, r1, r1 + w + 0.05).unwrap();
        let b = twochoice::win_probability(n, k, d1, d1 + k + 50).unwrap();
        assert!(close(a, b, 5e-3), "2-choice w={w}: {a} vs {b}");
    }
    assert!(close(twochoice::asymptotic_win_probability(0.5, 0.0, 0.5).unwrap(), 1.0, 1e-9));
    let gm = twochoice::asymptotic_win_probability(0.0, (-1.5f64).exp(), (-1.0f64).exp()).unwrap();
    assert!(close(gm, (-1.0f64).exp() + (-1.5f64).exp(), 1e-3));
}
