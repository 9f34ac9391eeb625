//! Product domains of unit boxes, per-subdomain quadrature, sampling of
//! test functions, and a first-order discrete Sobolev seminorm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{increment, DenseTensor, Shape, DEFAULT_ELEMENT_CAP};
use crate::testbed::{self, FunctionSpec, Smoothness};

/// Product of unit boxes `[0,1]^{n_j}`, one per subdomain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dims: Vec<usize>,
    /// `Some(order)` when subdomains were reordered; entry `k` is the source index.
    #[serde(default)]
    pub ordering_permutation: Option<Vec<usize>>,
}

impl DomainSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidGrid(format!(
                "subdomain dimensions {dims:?} must be non-empty and ≥ 1"
            )));
        }
        Ok(Self {
            dims,
            ordering_permutation: None,
        })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Stable reordering so that `n_1 ≤ … ≤ n_m`, with the permutation recorded.
    pub fn ordered_ascending(&self) -> Self {
        let mut order: Vec<usize> = (0..self.dims.len()).collect();
        order.sort_by_key(|&k| self.dims[k]);
        Self {
            dims: order.iter().map(|&k| self.dims[k]).collect(),
            ordering_permutation: Some(order),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    UniformTrapezoid,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub rule: QuadratureRule,
}

impl GridSpec {
    pub fn new(points_per_axis: usize, rule: QuadratureRule) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis = {points_per_axis}, need at least 2"
            )));
        }
        Ok(Self {
            points_per_axis,
            rule,
        })
    }

    pub fn trapezoid(points_per_axis: usize) -> Result<Self> {
        Self::new(points_per_axis, QuadratureRule::UniformTrapezoid)
    }

    /// Nodes and weights on `[0, 1]`.
    pub fn axis(&self) -> (Vec<f64>, Vec<f64>) {
        match self.rule {
            QuadratureRule::UniformTrapezoid => trapezoid(self.points_per_axis),
            QuadratureRule::GaussLegendre => gauss_legendre(self.points_per_axis),
        }
    }
}

fn trapezoid(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / (n - 1) as f64;
    let nodes = (0..n).map(|i| i as f64 * h).collect();
    let mut weights = vec![h; n];
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
    (nodes, weights)
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map ±x from [-1, 1] to [0, 1], ascending
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product grid on one subdomain `[0,1]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainGrid {
    pub dim: usize,
    /// `N^n` points, each `n` coordinates, row-major (last axis fastest).
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub fn build_grid(domain: &DomainSpec, grid: &GridSpec) -> Result<Vec<SubdomainGrid>> {
    build_grid_capped(domain, grid, DEFAULT_ELEMENT_CAP)
}

pub fn build_grid_capped(domain: &DomainSpec, grid: &GridSpec, cap: usize) -> Result<Vec<SubdomainGrid>> {
    let (nodes, weights) = grid.axis();
    let n_axis = grid.points_per_axis;
    domain
        .dims
        .iter()
        .map(|&dim| {
            let count = (n_axis as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
            if count > cap as u128 {
                return Err(Error::CapExceeded {
                    elements: count,
                    cap,
                });
            }
            let count = count as usize;
            let extents = vec![n_axis; dim];
            let mut idx = vec![0usize; dim];
            let mut points = Vec::with_capacity(count);
            let mut w = Vec::with_capacity(count);
            for _ in 0..count {
                points.push(idx.iter().map(|&i| nodes[i]).collect());
                w.push(idx.iter().map(|&i| weights[i]).product());
                increment(&mut idx, &extents);
            }
            Ok(SubdomainGrid {
                dim,
                points,
                weights: w,
            })
        })
        .collect()
}

/// A function sampled on a product grid, one tensor mode per subdomain.
#[derive(Debug, Clone)]
pub struct SampledFunction<T> {
    pub tensor: DenseTensor<T>,
    pub source: String,
    pub smoothness: Smoothness,
    pub gamma: Option<Vec<f64>>,
}

pub fn sample<T: Scalar>(spec: &FunctionSpec, domain: &DomainSpec, grid: &GridSpec) -> Result<SampledFunction<T>> {
    sample_capped(spec, domain, grid, DEFAULT_ELEMENT_CAP)
}

pub fn sample_capped<T: Scalar>(
    spec: &FunctionSpec,
    domain: &DomainSpec,
    grid: &GridSpec,
    cap: usize,
) -> Result<SampledFunction<T>> {
    if spec.dims != domain.dims {
        return Err(Error::InvalidFunction {
            id: spec.id.clone(),
            reason: format!("arity {:?} does not match domain {:?}", spec.dims, domain.dims),
        });
    }
    testbed::validate(spec)?;
    let grids = build_grid_capped(domain, grid, cap)?;
    let shape = Shape::with_cap(grids.iter().map(|g| g.points.len()).collect(), cap)?;
    let mut coords = Vec::with_capacity(domain.dims.iter().sum());
    let mut failure = None;
    let tensor = DenseTensor::from_fn(shape, |idx| {
        coords.clear();
        for (g, &i) in grids.iter().zip(idx) {
            coords.extend_from_slice(&g.points[i]);
        }
        match testbed::evaluate(spec, &coords) {
            Ok(v) if v.is_finite() => T::lit(v),
            _ => {
                failure.get_or_insert_with(|| coords.clone());
                T::zero()
            }
        }
    })?;
    if let Some(point) = failure {
        return Err(Error::Evaluation {
            id: spec.id.clone(),
            point,
        });
    }
    let weights = grids
        .iter()
        .map(|g| g.weights.iter().map(|&w| T::lit(w)).collect())
        .collect();
    Ok(SampledFunction {
        tensor: tensor.with_weights(weights)?,
        source: spec.id.clone(),
        smoothness: spec.smoothness,
        gamma: spec.gamma.clone(),
    })
}

/// First-order discrete Sobolev seminorm along `mode`, L² in all other modes.
///
/// The mode must carry uniform trapezoid weights on `[0, 1]`; derivatives are
/// forward differences scaled by `1/h`.
pub fn discrete_mixed_seminorm<T: Scalar>(t: &DenseTensor<T>, mode: usize) -> Result<T> {
    let ndim = t.ndim();
    if mode >= ndim {
        return Err(Error::ModeOutOfRange { mode, ndim });
    }
    let extents = t.extents();
    let n = extents[mode];
    if n < 3 {
        return Err(Error::InvalidGrid(format!("mode {mode} has {n} points, need at least 3")));
    }
    let weights = t.mode_weights().ok_or(Error::NonUniformGrid { mode })?;
    let h = T::one() / T::from_usize_lossy(n - 1);
    let half = h / T::lit(2.0);
    let tol = T::lit(1e-10) * h;
    let w = &weights[mode];
    let uniform = w.iter().enumerate().all(|(i, &x)| {
        let target = if i == 0 || i == n - 1 { half } else { h };
        (x - target).abs() <= tol
    });
    if !uniform {
        return Err(Error::NonUniformGrid { mode });
    }

    let left: usize = extents[..mode].iter().product();
    let right: usize = extents[mode + 1..].iter().product();
    let other_weight = |l: usize, r: usize| -> T {
        let mut rem = l;
        let mut acc = T::one();
        for k in (0..mode).rev() {
            acc *= weights[k][rem % extents[k]];
            rem /= extents[k];
        }
        let mut rem = r;
        for k in (mode + 1..ndim).rev() {
            acc *= weights[k][rem % extents[k]];
            rem /= extents[k];
        }
        acc
    };
    let v = t.values();
    let mut total = T::zero();
    for l in 0..left {
        for r in 0..right {
            let mut line = T::zero();
            for i in 0..n - 1 {
                let a = v[(l * n + i) * right + r];
                let b = v[(l * n + i + 1) * right + r];
                let d = (b - a) / h;
                line += d * d * h;
            }
            total += other_weight(l, r) * line;
        }
    }
    Ok(total.sqrt())
}
