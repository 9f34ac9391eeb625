mod common;

use common::*;
use lowrank::tensor::{contract_mode, fold_with_weights, unfold};
use lowrank::{DenseTensor, Error, Matrix, Shape, UnfoldingSpec};
use proptest::prelude::*;

/// Random extents (≤ 5 modes, ≤ 4 per mode), a random row/column partition and a seed.
fn case() -> impl Strategy<Value = (Vec<usize>, Vec<bool>, u64, bool)> {
    (1usize..=5).prop_flat_map(|m| {
        (
            prop::collection::vec(1usize..=4, m),
            prop::collection::vec(any::<bool>(), m),
            any::<u64>(),
            any::<bool>(),
        )
    })
}

fn build(extents: &[usize], seed: u64, weighted: bool) -> DenseTensor<f64> {
    let t = gaussian_tensor(extents, seed);
    if weighted {
        t.with_weights(random_weights(extents, seed ^ 0x5eed)).unwrap()
    } else {
        t
    }
}

fn partition(mask: &[bool]) -> UnfoldingSpec {
    let rows = (0..mask.len()).filter(|&k| mask[k]).collect();
    let cols = (0..mask.len()).filter(|&k| !mask[k]).collect();
    UnfoldingSpec::new(rows, cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fold_inverts_unfold((extents, mask, seed, weighted) in case()) {
        let t = build(&extents, seed, weighted);
        let spec = partition(&mask);
        let m = unfold(&t, &spec).unwrap();
        let back = fold_with_weights(&m, &spec, t.shape(), t.mode_weights()).unwrap();
        for (a, b) in t.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
        }
    }

    #[test]
    fn unfolding_preserves_the_norm((extents, mask, seed, weighted) in case()) {
        let t = build(&extents, seed, weighted);
        let m = unfold(&t, &partition(&mask)).unwrap();
        prop_assert!(rel_close(m.frobenius_norm(), t.frobenius_norm(), 1e-13));
    }

    #[test]
    fn permutation_round_trip((extents, _mask, seed, weighted) in case(), rot in 0usize..5) {
        let t = build(&extents, seed, weighted);
        let m = extents.len();
        let order: Vec<usize> = (0..m).map(|k| (k + rot) % m).collect();
        let p = t.permute(&order).unwrap();
        prop_assert!(rel_close(p.frobenius_norm(), t.frobenius_norm(), 1e-13));
        let mut inverse = vec![0; m];
        for (k, &o) in order.iter().enumerate() {
            inverse[o] = k;
        }
        let back = p.permute(&inverse).unwrap();
        prop_assert_eq!(back.values(), t.values());
    }

    #[test]
    fn orthonormal_contraction_never_increases_the_norm(
        (extents, _mask, seed, _w) in case(),
        mode_pick in 0usize..5,
        keep in 1usize..=4,
    ) {
        let t = build(&extents, seed, false);
        let mode = mode_pick % extents.len();
        let n = extents[mode];
        let keep = keep.min(n);
        // rows of a random orthogonal n×n matrix
        let q = lowrank::svd::svd(&gaussian_matrix(n, n, seed.wrapping_add(3))).u;
        let rows = q.transpose().leading_rows(keep);
        let c = contract_mode(&t, &rows, mode).unwrap();
        prop_assert!(c.frobenius_norm() <= t.frobenius_norm() * (1.0 + 1e-12));
    }
}

#[test]
fn scaled_norm_is_the_weighted_norm() {
    let t = DenseTensor::new(Shape::new(vec![2, 2]).unwrap(), vec![1.0, 2.0, 3.0, 4.0])
        .unwrap()
        .with_weights(vec![vec![0.25, 0.75], vec![0.5, 0.5]])
        .unwrap();
    let expect = (0.125 * 1.0 + 0.125 * 4.0 + 0.375 * 9.0 + 0.375 * 16.0f64).sqrt();
    assert!((t.frobenius_norm() - expect).abs() < 1e-15);
}

#[test]
fn unfolding_order_is_row_major() {
    // (2,3): mode-1 unfolding is the transpose of the natural matrix
    let t = DenseTensor::from_fn(Shape::new(vec![2, 3]).unwrap(), |i| (10 * i[0] + i[1]) as f64).unwrap();
    let m = unfold(&t, &UnfoldingSpec::mode(1, 2)).unwrap();
    assert_eq!(m.shape(), (3, 2));
    assert_eq!(m.as_slice(), &[0.0, 10.0, 1.0, 11.0, 2.0, 12.0]);
}

#[test]
fn contraction_shape_errors() {
    let t = gaussian_tensor(&[2, 3], 1);
    assert!(matches!(
        contract_mode(&t, &Matrix::identity(2), 1),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(matches!(contract_mode(&t, &Matrix::identity(2), 2), Err(Error::ModeOutOfRange { .. })));
}

#[test]
fn single_precision_tensors() {
    let t = DenseTensor::<f32>::from_fn(Shape::new(vec![3, 4]).unwrap(), |i| (i[0] * 4 + i[1]) as f32).unwrap();
    let m = unfold(&t, &UnfoldingSpec::mode(0, 2)).unwrap();
    assert_eq!(m.shape(), (3, 4));
    assert!((m.frobenius_norm() - t.frobenius_norm()).abs() < 1e-4);
}
