mod common;

use common::*;
use lowrank::svd::{gram_spectrum, projection_trace_check, svd, tail_energy, truncated_svd};
use lowrank::{Error, Matrix, SingularSpectrum, TruncationRule};
use proptest::prelude::*;

#[test]
fn singular_values_agree_with_nalgebra() {
    for (seed, (r, c)) in [(3, 3), (7, 4), (4, 9), (30, 12), (1, 5), (6, 1)].into_iter().enumerate() {
        let m = gaussian_matrix(r, c, seed as u64);
        let ours = svd(&m).sigma;
        let oracle = nalgebra_singular_values(&m);
        assert_eq!(ours.len(), oracle.len());
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12 * oracle[0], "{r}x{c}: {a} vs {b}");
        }
    }
}

#[test]
fn graded_spectrum_is_resolved_to_high_relative_accuracy() {
    let sigma: Vec<f64> = (0..10).map(|i| 10f64.powi(-i)).collect();
    let m = with_spectrum(14, 10, &sigma, 11);
    let ours = svd(&m).sigma;
    for (a, b) in ours.iter().zip(&sigma) {
        // the factors are only orthonormal to ~1e-16, so the smallest values
        // carry absolute error of that order
        assert!((a - b).abs() <= 1e-14 * b + 1e-15, "{a} vs {b}");
    }
}

#[test]
fn gram_route_matches_direct_route() {
    for seed in 0..5 {
        let m = gaussian_matrix(12, 7, 100 + seed);
        let direct = svd(&m).sigma;
        let gram = gram_spectrum(&m).singular_values();
        for (a, b) in direct.iter().zip(gram.values()) {
            assert!((a - b).abs() <= 1e-10 * direct[0]);
        }
        let lambdas: Vec<f64> = direct.iter().map(|s| s * s).collect();
        for (a, b) in lambdas.iter().zip(&gram_spectrum(&m).eigenvalues) {
            assert!((a - b).abs() <= 1e-12 * lambdas[0]);
        }
    }
}

#[test]
fn transpose_shares_the_spectrum() {
    let m = gaussian_matrix(9, 5, 7);
    let a = svd(&m).sigma;
    let b = svd(&m.transpose()).sigma;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-13 * a[0]);
    }
}

#[test]
fn eckart_young_tail_is_the_truncation_error() {
    let m = gaussian_matrix(10, 8, 21);
    for r in 1..=8 {
        let t = truncated_svd(&m, TruncationRule::FixedRank(r)).unwrap();
        let err = m.sub(&t.reconstruct()).unwrap().frobenius_norm();
        assert!((err - t.tail).abs() <= 1e-12 * m.frobenius_norm());
        // best rank-r error from the oracle spectrum
        let oracle = nalgebra_singular_values(&m);
        let best = oracle[r..].iter().map(|s| s * s).sum::<f64>().sqrt();
        assert!((err - best).abs() <= 1e-12 * oracle[0]);
    }
}

#[test]
fn projection_trace_identity() {
    let m = gaussian_matrix(8, 6, 5);
    for r in 1..=6 {
        let (lhs, rhs) = projection_trace_check(&m, r).unwrap();
        assert!((lhs - rhs).abs() <= 1e-11 * m.frobenius_norm_sq(), "r={r}: {lhs} vs {rhs}");
    }
}

#[test]
fn tail_rules_choose_minimal_rank() {
    let m = with_spectrum(8, 8, &[4.0, 2.0, 1.0, 0.5, 0.25], 3);
    let tail3 = (0.25f64 * 0.25 + 0.5 * 0.5).sqrt();
    let t = truncated_svd(&m, TruncationRule::TailEnergy(tail3 * 1.0001)).unwrap();
    assert_eq!(t.rank, 3);
    let t = truncated_svd(&m, TruncationRule::TailEnergy(tail3 * 0.9999)).unwrap();
    assert_eq!(t.rank, 4);
    let total = m.frobenius_norm();
    let t = truncated_svd(&m, TruncationRule::RelativeTailEnergy(tail3 / total * 1.0001)).unwrap();
    assert_eq!(t.rank, 3);
}

#[test]
fn unreachable_tolerance_is_reported() {
    let m = gaussian_matrix(6, 6, 9);
    assert_eq!(truncated_svd(&m, TruncationRule::TailEnergy(0.0)).unwrap().rank, 6);
    // σ₂ sits below 1e-13·σ₁, so only the first value is certified
    let m = with_spectrum(6, 6, &[1.0, 1e-15], 9);
    let err = truncated_svd(&m, TruncationRule::TailEnergy(1e-17)).unwrap_err();
    assert!(matches!(err, Error::BelowNoiseFloor { floor, .. } if floor > 1e-17), "{err:?}");
    let err = truncated_svd(&m, TruncationRule::FixedRank(7)).unwrap_err();
    assert!(matches!(err, Error::RankInfeasible { rank: 7, max: 6, .. }));
}

#[test]
fn zero_matrix_has_zero_spectrum_and_orthonormal_factors() {
    let m = Matrix::<f64>::zeros(4, 3);
    let t = truncated_svd(&m, TruncationRule::FixedRank(3)).unwrap();
    assert!(t.spectrum.values().iter().all(|&s| s == 0.0));
    assert!(t.u.orthonormality_defect() < 1e-14);
    assert!(t.v.orthonormality_defect() < 1e-14);
}

#[test]
fn f32_path_agrees_to_single_precision() {
    let m = gaussian_matrix(10, 6, 77);
    let m32 = Matrix::from_fn(10, 6, |i, j| m.get(i, j) as f32);
    let a = svd(&m).sigma;
    let b = svd(&m32).sigma;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - *y as f64).abs() <= 1e-5 * a[0]);
    }
}

#[test]
fn tail_energy_sums_from_the_end() {
    let s = SingularSpectrum::new(vec![3.0, 4.0, 0.0]);
    assert_eq!(s.values(), &[4.0, 3.0, 0.0]);
    assert_eq!(tail_energy(&s, 0), 5.0);
    assert_eq!(tail_energy(&s, 1), 3.0);
    assert_eq!(tail_energy(&s, 3), 0.0);
}

fn small_matrix() -> impl Strategy<Value = Matrix<f64>> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0f64..10.0, r * c).prop_map(move |v| Matrix::from_vec(r, c, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn factorization_reconstructs(m in small_matrix()) {
        let s = svd(&m);
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.u.orthonormality_defect() < 1e-12);
        prop_assert!(s.v.orthonormality_defect() < 1e-12);
        let mut us = s.u.clone();
        us.scale_columns(&s.sigma);
        let rec = us.matmul(&s.v.transpose()).unwrap();
        prop_assert!(m.sub(&rec).unwrap().frobenius_norm() <= 1e-12 * m.frobenius_norm().max(1.0));
    }

    #[test]
    fn energy_is_conserved(m in small_matrix()) {
        let s = svd(&m);
        let e: f64 = s.sigma.iter().map(|x| x * x).sum();
        prop_assert!((e - m.frobenius_norm_sq()).abs() <= 1e-12 * m.frobenius_norm_sq().max(1.0));
    }

    #[test]
    fn projection_error_shrinks_with_rank(m in small_matrix()) {
        let kmax = m.rows().min(m.cols());
        let mut last = f64::INFINITY;
        for r in 1..=kmax {
            let t = truncated_svd(&m, TruncationRule::FixedRank(r)).unwrap();
            prop_assert!(t.tail <= last + 1e-12);
            last = t.tail;
        }
        prop_assert!(last <= 1e-12 * m.frobenius_norm().max(1.0));
    }

    #[test]
    fn sign_convention_holds(m in small_matrix()) {
        let k = m.rows().min(m.cols());
        let t = truncated_svd(&m, TruncationRule::FixedRank(k)).unwrap();
        for j in 0..t.rank {
            if let Some(first) = t.u.column(j).into_iter().find(|x| x.abs() > 1e-12) {
                prop_assert!(first > 0.0);
            }
        }
    }
}
