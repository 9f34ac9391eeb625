//! Spectra frozen from an independent numpy computation on trapezoid grids.

use lowrank::quadrature::sample;
use lowrank::svd::{fit_decay_exponent, truncated_svd};
use lowrank::tensor::unfold;
use lowrank::testbed::{evaluate, registry};
use lowrank::{DomainSpec, FunctionSpec, GridSpec, SingularSpectrum, TruncationRule, UnfoldingSpec};
use std::f64::consts::PI;

fn mode_spectra(f: &FunctionSpec, n: usize) -> Vec<SingularSpectrum<f64>> {
    let s = sample::<f64>(f, &DomainSpec::new(f.dims.clone()).unwrap(), &GridSpec::trapezoid(n).unwrap()).unwrap();
    let m = f.dims.len();
    (0..m)
        .map(|j| {
            let u = unfold(&s.tensor, &UnfoldingSpec::mode(j, m)).unwrap();
            truncated_svd(&u, TruncationRule::FixedRank(1)).unwrap().spectrum
        })
        .collect()
}

#[test]
fn weighted_product_is_separable() {
    let f = FunctionSpec::new("weighted_product", vec![1; 4]).unwrap();
    for s in mode_spectra(&f, 17) {
        assert!((s.values()[0] - 1.85786318).abs() < 1e-8);
        assert!(s.values()[1] <= 1e-12 * s.values()[0]);
    }
}

#[test]
fn weighted_exp_is_separable() {
    let f = FunctionSpec::new("weighted_exp", vec![1; 3]).unwrap();
    for s in mode_spectra(&f, 9) {
        assert!(s.values()[1] <= 1e-12 * s.values()[0]);
    }
}

#[test]
fn weighted_coupled_second_value_tracks_gamma() {
    const GOLDEN: [[f64; 3]; 4] = [
        [6.0717033113450247e-01, 3.5989639928057067e-03, 1.8604854201277898e-05],
        [6.0717128270253429e-01, 3.4346961712169097e-03, 1.4883496375248872e-05],
        [6.0718015734424502e-01, 1.0101601734358642e-03, 1.3392098798682081e-06],
        [6.0718084926883831e-01, 4.2447504909228206e-04, 2.3699657321130100e-07],
    ];
    let f = FunctionSpec::new("weighted_coupled", vec![1; 4]).unwrap();
    let gamma = f.gamma.clone().unwrap();
    for (j, s) in mode_spectra(&f, 17).iter().enumerate() {
        for (a, b) in s.values().iter().zip(GOLDEN[j]) {
            assert!((a - b).abs() <= 1e-9 * GOLDEN[j][0] + 1e-8 * b, "mode {j}: {a} vs {b}");
        }
        if j >= 1 {
            let ratio = s.values()[1] / gamma[j];
            assert!((0.02..0.04).contains(&ratio), "mode {j}: σ₂/γ = {ratio}");
        }
    }
}

#[test]
fn rank_one_unfoldings() {
    let f = FunctionSpec::new("rank_one", vec![1; 3]).unwrap();
    for s in mode_spectra(&f, 11) {
        assert!(s.values()[1] <= 1e-12 * s.values()[0]);
    }
}

#[test]
fn brownian_bridge_decay() {
    let f = FunctionSpec::new("brownian_bridge", vec![1, 1]).unwrap();
    let s = &mode_spectra(&f, 512)[0];
    for alpha in 1..=8 {
        let exact = 1.0 / (PI * alpha as f64).powi(2);
        assert!((s.values()[alpha - 1] - exact).abs() <= 2.1e-4 * exact + 1e-15, "α={alpha}");
    }
    let fit = fit_decay_exponent(s).unwrap();
    assert_eq!(fit.window, (2, 128));
    assert!((fit.exponent + 4.0).abs() <= 0.3);
    assert!((fit.exponent - (-3.972)).abs() < 5e-3);
}

#[test]
fn gauss_kernel_decays_super_algebraically() {
    let f = FunctionSpec::new("gauss_kernel", vec![1, 1]).unwrap();
    let s = &mode_spectra(&f, 65)[0];
    let v = s.values();
    let ratios: Vec<f64> = (0..8).map(|a| v[a + 1] / v[a]).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    assert!(v[8] / v[0] < 1e-11);
    assert!((v[1] / v[0] - 1.45984067e-01).abs() < 1e-8);
}

#[test]
fn abs_diff_decays_algebraically() {
    let f = FunctionSpec::new("abs_diff", vec![1, 1]).unwrap();
    let s = &mode_spectra(&f, 257)[0];
    assert!((s.values()[0] - 0.34741279).abs() < 1e-8);
    let fit = fit_decay_exponent(s).unwrap();
    assert_eq!(fit.window, (2, 65));
    assert!((fit.exponent - (-4.4247)).abs() < 1e-3, "{}", fit.exponent);
}

#[test]
fn every_entry_is_deterministic_and_bounded() {
    for entry in registry() {
        let dims = match entry.id {
            "brownian_bridge" | "gauss_kernel" | "abs_diff" => vec![1, 1],
            _ => vec![1, 2, 1],
        };
        let f = FunctionSpec::new(entry.id, dims.clone()).unwrap();
        let total: usize = dims.iter().sum();
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            let point: Vec<f64> = (0..total)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state >> 11) as f64 / (1u64 << 53) as f64
                })
                .collect();
            let a = evaluate(&f, &point).unwrap();
            let b = evaluate(&f, &point).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
            assert!(a.is_finite() && a.abs() <= 10.0, "{}: {a}", entry.id);
        }
    }
}
