//! Dense multi-axis arrays with optional per-mode quadrature weights.
//!
//! Layout is row-major with the last mode varying fastest. When mode weights
//! are present, unfoldings absorb `√w` of every mode so that the plain
//! Frobenius geometry of the matrix equals the discrete L² geometry of the
//! sampled function.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Default cap on the number of stored elements (2^27).
pub const DEFAULT_ELEMENT_CAP: usize = 1 << 27;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    extents: Vec<usize>,
}

impl Shape {
    pub fn new(extents: Vec<usize>) -> Result<Self> {
        Self::with_cap(extents, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_cap(extents: Vec<usize>, cap: usize) -> Result<Self> {
        if let Some(mode) = extents.iter().position(|&e| e == 0) {
            return Err(Error::ZeroExtent { mode });
        }
        let elements: u128 = extents.iter().map(|&e| e as u128).product();
        if elements > cap as u128 {
            return Err(Error::CapExceeded { elements, cap });
        }
        Ok(Self { extents })
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn ndim(&self) -> usize {
        self.extents.len()
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides (last mode fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.extents.len()];
        for k in (0..self.extents.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.extents[k + 1];
        }
        strides
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    shape: Shape,
    values: Vec<T>,
    mode_weights: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn new(shape: Shape, values: Vec<T>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::LengthMismatch {
                expected: shape.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            shape,
            values,
            mode_weights: None,
        })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.len();
        Self {
            shape,
            values: vec![T::zero(); n],
            mode_weights: None,
        }
    }

    /// Builds a tensor by evaluating `f` at every multi-index in row-major order.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(shape.len());
        let mut idx = vec![0usize; shape.ndim()];
        for _ in 0..shape.len() {
            values.push(f(&idx));
            increment(&mut idx, shape.extents());
        }
        Self::new(shape, values)
    }

    /// Attaches per-mode quadrature weights (all entries must be positive).
    pub fn with_weights(mut self, weights: Vec<Vec<T>>) -> Result<Self> {
        validate_weights(&self.shape, &weights)?;
        self.mode_weights = Some(weights);
        Ok(self)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn extents(&self) -> &[usize] {
        self.shape.extents()
    }

    pub fn ndim(&self) -> usize {
        self.shape.ndim()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn mode_weights(&self) -> Option<&[Vec<T>]> {
        self.mode_weights.as_deref()
    }

    pub fn get(&self, idx: &[usize]) -> T {
        let offset: usize = idx
            .iter()
            .zip(self.shape.strides())
            .map(|(&i, s)| i * s)
            .sum();
        self.values[offset]
    }

    /// Values multiplied by `∏_j √w_j(i_j)`; identical to `values` when unweighted.
    pub fn scaled_values(&self) -> Vec<T> {
        match &self.mode_weights {
            None => self.values.clone(),
            Some(w) => {
                let roots: Vec<Vec<T>> = w
                    .iter()
                    .map(|wj| wj.iter().map(|x| x.sqrt()).collect())
                    .collect();
                apply_mode_factors(&self.values, self.shape.extents(), &roots)
            }
        }
    }

    /// Inverse of [`scaled_values`](Self::scaled_values).
    pub fn from_scaled(
        shape: Shape,
        scaled: Vec<T>,
        weights: Option<Vec<Vec<T>>>,
    ) -> Result<Self> {
        match weights {
            None => Self::new(shape, scaled),
            Some(w) => {
                validate_weights(&shape, &w)?;
                if scaled.len() != shape.len() {
                    return Err(Error::LengthMismatch {
                        expected: shape.len(),
                        got: scaled.len(),
                    });
                }
                let inv: Vec<Vec<T>> = w
                    .iter()
                    .map(|wj| wj.iter().map(|x| x.sqrt().recip()).collect())
                    .collect();
                let values = apply_mode_factors(&scaled, shape.extents(), &inv);
                Self::new(shape, values)?.with_weights(w)
            }
        }
    }

    /// Reorders modes so that output mode `k` is input mode `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.ndim())?;
        let extents: Vec<usize> = order.iter().map(|&k| self.extents()[k]).collect();
        let shape = Shape {
            extents: extents.clone(),
        };
        let values = permute_values(&self.values, self.extents(), order);
        let mode_weights = self
            .mode_weights
            .as_ref()
            .map(|w| order.iter().map(|&k| w[k].clone()).collect());
        Ok(Self {
            shape,
            values,
            mode_weights,
        })
    }

    /// Weighted Frobenius norm `√(Σ w(idx)·v(idx)²)`.
    pub fn frobenius_norm(&self) -> T {
        match &self.mode_weights {
            None => self.values.iter().map(|&v| v * v).sum::<T>().sqrt(),
            Some(_) => self.scaled_values().iter().map(|&v| v * v).sum::<T>().sqrt(),
        }
    }

    /// Weighted Frobenius norm of `self − other`; weights of `self` are used.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if self.extents() != other.extents() {
            return Err(Error::DimensionMismatch(format!(
                "shapes {:?} and {:?} differ",
                self.extents(),
                other.extents()
            )));
        }
        let diff: Vec<T> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a - b)
            .collect();
        let d = Self {
            shape: self.shape.clone(),
            values: diff,
            mode_weights: self.mode_weights.clone(),
        };
        Ok(d.frobenius_norm())
    }
}

/// Split of the modes into a row group and a column group.
///
/// With `stack_rank = Some(r)` the tensor carries a leading auxiliary mode of
/// extent `r` (a bond index) which is prepended to the row group; `rows` and
/// `cols` then refer to the remaining modes, numbered from zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfoldingSpec {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub stack_rank: Option<usize>,
}

impl UnfoldingSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Self {
            rows,
            cols,
            stack_rank: None,
        }
    }

    /// Mode `mode` against all others, in increasing order.
    pub fn mode(mode: usize, ndim: usize) -> Self {
        Self::new(vec![mode], (0..ndim).filter(|&k| k != mode).collect())
    }

    /// Leading modes `0..split` as rows, the rest as columns.
    pub fn prefix(split: usize, ndim: usize) -> Self {
        Self::new((0..split).collect(), (split..ndim).collect())
    }

    pub fn stacked(stack_rank: usize, rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Self {
            rows,
            cols,
            stack_rank: Some(stack_rank),
        }
    }

    /// Resolves to a full-mode permutation and the number of row modes.
    fn resolve(&self, extents: &[usize]) -> Result<(Vec<usize>, usize)> {
        let ndim = extents.len();
        let (offset, mut order) = match self.stack_rank {
            None => (0, Vec::with_capacity(ndim)),
            Some(r) => {
                if r == 0 {
                    return Err(Error::InvalidUnfolding("stack rank must be ≥ 1".into()));
                }
                if extents.first() != Some(&r) {
                    return Err(Error::InvalidUnfolding(format!(
                        "stack rank {r} does not match leading extent {:?}",
                        extents.first()
                    )));
                }
                (1, vec![0])
            }
        };
        order.extend(self.rows.iter().map(|&k| k + offset));
        let n_rows = order.len();
        order.extend(self.cols.iter().map(|&k| k + offset));
        check_permutation(&order, ndim)
            .map_err(|_| Error::InvalidUnfolding(format!("{self:?} is not a partition of {ndim} modes")))?;
        Ok((order, n_rows))
    }
}

pub fn unfold<T: Scalar>(t: &DenseTensor<T>, spec: &UnfoldingSpec) -> Result<Matrix<T>> {
    let (order, n_rows) = spec.resolve(t.extents())?;
    let rows = checked_product(order[..n_rows].iter().map(|&k| t.extents()[k]))?;
    let cols = checked_product(order[n_rows..].iter().map(|&k| t.extents()[k]))?;
    let scaled = t.scaled_values();
    let data = permute_values(&scaled, t.extents(), &order);
    Matrix::from_vec(rows, cols, data)
}

/// Inverse of [`unfold`] for unweighted tensors.
pub fn fold<T: Scalar>(mat: &Matrix<T>, spec: &UnfoldingSpec, shape: &Shape) -> Result<DenseTensor<T>> {
    fold_with_weights(mat, spec, shape, None)
}

/// Inverse of [`unfold`]; the `√w` factors absorbed by `unfold` are divided back out.
pub fn fold_with_weights<T: Scalar>(
    mat: &Matrix<T>,
    spec: &UnfoldingSpec,
    shape: &Shape,
    weights: Option<&[Vec<T>]>,
) -> Result<DenseTensor<T>> {
    let (order, n_rows) = spec.resolve(shape.extents())?;
    let rows: usize = order[..n_rows].iter().map(|&k| shape.extents()[k]).product();
    let cols: usize = order[n_rows..].iter().map(|&k| shape.extents()[k]).product();
    if mat.shape() != (rows, cols) {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, unfolding of {:?} needs {rows}x{cols}",
            mat.rows(),
            mat.cols(),
            shape.extents()
        )));
    }
    let permuted_extents: Vec<usize> = order.iter().map(|&k| shape.extents()[k]).collect();
    let inverse = inverse_permutation(&order);
    let scaled = permute_values(mat.as_slice(), &permuted_extents, &inverse);
    DenseTensor::from_scaled(shape.clone(), scaled, weights.map(|w| w.to_vec()))
}

/// Mode-wise product: replaces mode `mode` (extent n) by `m.rows()` via `m` (p × n).
///
/// Operates on raw values. Weights of the other modes are kept; the
/// contracted mode gets unit weights.
pub fn contract_mode<T: Scalar>(t: &DenseTensor<T>, m: &Matrix<T>, mode: usize) -> Result<DenseTensor<T>> {
    let ndim = t.ndim();
    if mode >= ndim {
        return Err(Error::ModeOutOfRange { mode, ndim });
    }
    let extents = t.extents();
    let n = extents[mode];
    if m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, mode {mode} has extent {n}",
            m.cols()
        )));
    }
    let p = m.rows();
    let left: usize = extents[..mode].iter().product();
    let right: usize = extents[mode + 1..].iter().product();
    let mut out = vec![T::zero(); left * p * right];
    let vals = t.values();
    for l in 0..left {
        for a in 0..p {
            let dst = &mut out[(l * p + a) * right..(l * p + a + 1) * right];
            for i in 0..n {
                let c = m.get(a, i);
                if c == T::zero() {
                    continue;
                }
                let src = &vals[(l * n + i) * right..(l * n + i + 1) * right];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    let mut new_extents = extents.to_vec();
    new_extents[mode] = p;
    let shape = Shape {
        extents: new_extents,
    };
    let mut result = DenseTensor::new(shape, out)?;
    if let Some(w) = t.mode_weights() {
        let mut w = w.to_vec();
        w[mode] = vec![T::one(); p];
        result = result.with_weights(w)?;
    }
    Ok(result)
}

pub fn frobenius_norm<T: Scalar>(t: &DenseTensor<T>) -> T {
    t.frobenius_norm()
}

pub(crate) fn increment(idx: &mut [usize], extents: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < extents[k] {
            return;
        }
        idx[k] = 0;
    }
}

pub(crate) fn inverse_permutation(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (k, &o) in order.iter().enumerate() {
        inv[o] = k;
    }
    inv
}

fn check_permutation(order: &[usize], ndim: usize) -> Result<()> {
    let mut seen = vec![false; ndim];
    if order.len() != ndim {
        return Err(Error::InvalidUnfolding(format!(
            "{} modes listed, tensor has {ndim}",
            order.len()
        )));
    }
    for &k in order {
        if k >= ndim || seen[k] {
            return Err(Error::InvalidUnfolding(format!("{order:?} is not a permutation")));
        }
        seen[k] = true;
    }
    Ok(())
}

fn checked_product(mut it: impl Iterator<Item = usize>) -> Result<usize> {
    it.try_fold(1usize, |acc, e| acc.checked_mul(e))
        .ok_or_else(|| Error::DimensionMismatch("matrix dimension overflows usize".into()))
}

fn validate_weights<T: Scalar>(shape: &Shape, weights: &[Vec<T>]) -> Result<()> {
    if weights.len() != shape.ndim() {
        return Err(Error::InvalidWeights {
            mode: weights.len().min(shape.ndim()),
            reason: format!("{} weight vectors for {} modes", weights.len(), shape.ndim()),
        });
    }
    for (mode, (w, &e)) in weights.iter().zip(shape.extents()).enumerate() {
        if w.len() != e {
            return Err(Error::InvalidWeights {
                mode,
                reason: format!("length {} differs from extent {e}", w.len()),
            });
        }
        if w.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
            return Err(Error::InvalidWeights {
                mode,
                reason: "entries must be positive and finite".into(),
            });
        }
    }
    Ok(())
}

/// Multiplies every entry by `∏_j factors[j][i_j]`.
fn apply_mode_factors<T: Scalar>(values: &[T], extents: &[usize], factors: &[Vec<T>]) -> Vec<T> {
    let mut out = values.to_vec();
    let ndim = extents.len();
    let mut right = 1usize;
    for mode in (0..ndim).rev() {
        let n = extents[mode];
        let f = &factors[mode];
        for (chunk_idx, chunk) in out.chunks_mut(right).enumerate() {
            let s = f[chunk_idx % n];
            for v in chunk {
                *v *= s;
            }
        }
        right *= n;
    }
    out
}

/// Row-major transposition: output mode `k` is input mode `order[k]`.
pub(crate) fn permute_values<T: Copy>(values: &[T], extents: &[usize], order: &[usize]) -> Vec<T> {
    let ndim = extents.len();
    if order.iter().enumerate().all(|(k, &o)| k == o) || ndim == 0 {
        return values.to_vec();
    }
    let mut in_strides = vec![1usize; ndim];
    for k in (0..ndim - 1).rev() {
        in_strides[k] = in_strides[k + 1] * extents[k + 1];
    }
    let out_extents: Vec<usize> = order.iter().map(|&k| extents[k]).collect();
    let out_strides: Vec<usize> = order.iter().map(|&k| in_strides[k]).collect();
    let total = values.len();
    let mut out = Vec::with_capacity(total);
    let last = ndim - 1;
    let inner = out_extents[last];
    let inner_stride = out_strides[last];
    let mut idx = vec![0usize; ndim];
    let mut base = 0usize;
    while out.len() < total {
        for i in 0..inner {
            out.push(values[base + i * inner_stride]);
        }
        // advance the outer odometer (modes 0..last)
        let mut k = last;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            base += out_strides[k];
            if idx[k] < out_extents[k] {
                break;
            }
            base -= out_strides[k] * out_extents[k];
            idx[k] = 0;
        }
    }
    out
}
