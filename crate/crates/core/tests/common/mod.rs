#![allow(dead_code)]

use lowrank::{DenseTensor, Matrix, Shape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix<f64> {
    let mut r = rng(seed);
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut r))
}

pub fn gaussian_tensor(extents: &[usize], seed: u64) -> DenseTensor<f64> {
    let mut r = rng(seed);
    let shape = Shape::new(extents.to_vec()).unwrap();
    let values = (0..shape.len()).map(|_| StandardNormal.sample(&mut r)).collect();
    DenseTensor::new(shape, values).unwrap()
}

/// Positive weights per mode, not normalized.
pub fn random_weights(extents: &[usize], seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut r = rng(seed);
    extents
        .iter()
        .map(|&n| (0..n).map(|_| r.random_range(0.1..2.0)).collect())
        .collect()
}

/// Matrix with prescribed singular values and random orthogonal factors.
pub fn with_spectrum(rows: usize, cols: usize, sigma: &[f64], seed: u64) -> Matrix<f64> {
    let q1 = orthonormal(rows, sigma.len(), seed);
    let q2 = orthonormal(cols, sigma.len(), seed.wrapping_add(1));
    let mut us = q1;
    us.scale_columns(sigma);
    us.matmul(&q2.transpose()).unwrap()
}

fn orthonormal(n: usize, k: usize, seed: u64) -> Matrix<f64> {
    let g = gaussian_matrix(n, k, seed);
    let na = nalgebra::DMatrix::from_row_slice(n, k, g.as_slice());
    let q = na.qr().q();
    Matrix::from_fn(n, k, |i, j| q[(i, j)])
}

pub fn nalgebra_singular_values(m: &Matrix<f64>) -> Vec<f64> {
    let na = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let mut s: Vec<f64> = na.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
