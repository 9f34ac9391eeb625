use lowrank::schedule::{
    schedule, truncation_index, tt_ranks_unweighted, tt_ranks_weighted, tt_weighted_recursion, tucker_ranks_unweighted,
    tucker_ranks_weighted,
};
use lowrank::{Regime, SchedulerParams};
use proptest::prelude::*;

fn golden_tt() -> SchedulerParams {
    SchedulerParams::weighted(0.1, 1.0, vec![1; 8], 0.5, 3.0)
}

#[test]
fn weighted_tt_golden() {
    let p = golden_tt();
    let s = tt_ranks_weighted(&p).unwrap();
    assert_eq!(s.m, Some(2));
    assert_eq!(s.ranks, vec![10, 18, 0, 0, 0, 0, 0]);
    assert_eq!(s.predicted_cost, 190);
    // untruncated recursion: an initial burst, then non-increasing down to 1
    let full = tt_weighted_recursion(&p, 12).unwrap();
    assert_eq!(&full[..6], &[10, 18, 12, 4, 1, 1]);
    let peak = full.iter().enumerate().max_by_key(|(_, r)| **r).unwrap().0;
    assert!(full[peak..].windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*full.last().unwrap(), 1);
    // cost bound from the proof: cost ≤ M·exp(ε^{-n/k})²
    let bound = s.m.unwrap() as f64 * (10f64.exp()).powi(2);
    assert!((s.predicted_cost as f64) <= bound);
}

#[test]
fn truncation_index_values() {
    assert_eq!(truncation_index(0.1, 3.0).unwrap(), 2);
    assert_eq!(truncation_index(0.1, 2.0).unwrap(), 3);
    assert_eq!(truncation_index(1e-4, 3.0).unwrap(), 10);
}

#[test]
fn first_mode_matches_unweighted_rule() {
    for eps in [0.3, 0.1, 0.01] {
        let w = tucker_ranks_weighted(&SchedulerParams::weighted(eps, 1.0, vec![1; 3], 0.5, 2.0)).unwrap();
        let u = tucker_ranks_unweighted(&SchedulerParams::unweighted(eps, 1.0, vec![1; 3])).unwrap();
        assert_eq!(w.ranks[0], u.ranks[0]);
        let t = tt_ranks_weighted(&SchedulerParams::weighted(eps, 1.0, vec![1; 3], 0.5, 2.0)).unwrap();
        assert_eq!(t.ranks[0], u.ranks[0]);
    }
}

#[test]
fn two_modes_tt_equals_bivariate_rule() {
    let s = tt_ranks_unweighted(&SchedulerParams::unweighted(0.05, 1.5, vec![2, 3])).unwrap();
    assert_eq!(s.ranks, vec![(0.05f64.powf(-2.0 / 1.5)).ceil() as u64]);
}

#[test]
fn near_one_epsilon_gives_unit_ranks() {
    // within the ceiling snap of 1
    let eps = 1.0 - 1e-13;
    for regime in [Regime::TuckerUnweighted, Regime::TtUnweighted] {
        let s = schedule(regime, &SchedulerParams::unweighted(eps, 1.0, vec![1, 2, 3])).unwrap();
        assert!(s.ranks.iter().all(|&r| r == 1), "{regime:?}");
    }
}

#[test]
fn tt_cost_within_unweighted_bound() {
    let s = tt_ranks_unweighted(&SchedulerParams::unweighted(0.1, 1.0, vec![1; 3])).unwrap();
    assert_eq!(s.predicted_cost, 1010);
    assert!(s.predicted_cost <= 100_000);
}

#[test]
fn weighted_log_cost_saturates() {
    let logc = |m: usize| {
        tucker_ranks_weighted(&SchedulerParams::weighted(0.1, 1.0, vec![1; m], 0.5, 2.0))
            .unwrap()
            .log_cost()
    };
    let (a, b) = (logc(16), logc(64));
    assert!((b - a) / a < 0.01);
    let unweighted = |m: usize| {
        tucker_ranks_unweighted(&SchedulerParams::unweighted(0.1, 1.0, vec![1; m]))
            .unwrap()
            .log_cost()
    };
    let slope = (unweighted(64) - unweighted(16)) / 48.0;
    assert!((slope - 10f64.ln()).abs() <= 0.1 * 10f64.ln());
}

#[test]
fn weighted_ranks_reach_one_and_partial_sums_stay_bounded() {
    let p = SchedulerParams::weighted(0.01, 1.0, vec![1; 400], 0.5, 2.0);
    let s = tucker_ranks_weighted(&p).unwrap();
    assert!(s.ranks[300..].iter().all(|&r| r == 1));
    let partial: Vec<f64> = s
        .ranks
        .iter()
        .scan(0.0, |acc, &r| {
            *acc += (r as f64).ln();
            Some(*acc)
        })
        .collect();
    assert_eq!(partial[199], partial[399]);
}

#[test]
fn explicit_gamma_is_used() {
    let mut p = SchedulerParams::weighted(0.1, 1.0, vec![1; 3], 0.5, 2.0);
    p.gamma = Some(vec![1.0, 1.0, 1.0]);
    let s = tucker_ranks_weighted(&p).unwrap();
    // γ ≡ 1: r_j = ⌈10·j^{1.5}⌉
    assert_eq!(s.ranks, vec![10, 29, 52]);
    p.gamma = Some(vec![1.0]);
    assert!(tucker_ranks_weighted(&p).is_err());
}

#[test]
fn json_round_trip() {
    let s = tt_ranks_weighted(&golden_tt()).unwrap();
    let json = s.to_json();
    assert!(json.contains("\"M\": 2"));
    assert!(json.contains("\"paper_M_value\""));
    let back: lowrank::RankSchedule = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
}

fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=6)
}

proptest! {
    #[test]
    fn shrinking_epsilon_never_lowers_a_rank(
        e1 in 0.001f64..0.99, shrink in 0.05f64..1.0, k in 0.5f64..4.0, d in dims(), m in 2usize..12,
    ) {
        let e2 = e1 * shrink;
        for regime in [Regime::TuckerUnweighted, Regime::TtUnweighted] {
            let a = schedule(regime, &SchedulerParams::unweighted(e1, k, d.clone()));
            let b = schedule(regime, &SchedulerParams::unweighted(e2, k, d.clone()));
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert!(a.ranks.iter().zip(&b.ranks).all(|(x, y)| y >= x)),
                // ranks beyond 2^53 are rejected; the smaller ε must overflow first
                (Ok(_), Err(_)) | (Err(_), Err(_)) => {}
                (Err(e), Ok(_)) => prop_assert!(false, "larger epsilon overflowed: {e}"),
            }
        }
        for regime in [Regime::TuckerWeighted, Regime::TtWeighted] {
            let a = schedule(regime, &SchedulerParams::weighted(e1, k, vec![1; m], 0.5, 0.6 + k));
            let b = schedule(regime, &SchedulerParams::weighted(e2, k, vec![1; m], 0.5, 0.6 + k));
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(a.ranks.iter().zip(&b.ranks).all(|(x, y)| y >= x));
                prop_assert!(b.m >= a.m);
            }
        }
    }

    #[test]
    fn unweighted_tucker_cost_matches_closed_form(e in 0.01f64..0.9, k in 0.5f64..4.0, n in 1usize..=3, m in 1usize..=5) {
        let s = tucker_ranks_unweighted(&SchedulerParams::unweighted(e, k, vec![n; m])).unwrap();
        let closed = e.powf(-((n * m) as f64) / k);
        let cost = s.predicted_cost as f64;
        if s.cost_saturated {
            prop_assert_eq!(s.predicted_cost, u64::MAX);
            prop_assert!(closed * 2f64.powi(m as i32) >= u64::MAX as f64);
            return Ok(());
        }
        prop_assert!(cost >= closed * (1.0 - 1e-9));
        prop_assert!(cost <= closed * 2f64.powi(m as i32) * (1.0 + 1e-9));
    }

    #[test]
    fn active_ranks_are_positive(e in 0.001f64..0.9, m in 2usize..20) {
        let s = tt_ranks_weighted(&SchedulerParams::weighted(e, 1.0, vec![1; m], 0.5, 2.0)).unwrap();
        let mm = s.m.unwrap();
        for (j, &r) in s.ranks.iter().enumerate() {
            prop_assert_eq!(r == 0, j >= mm);
        }
    }
}
