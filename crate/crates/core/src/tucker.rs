//! Higher-order SVD construction of the Tucker format.
//!
//! Every factor is the leading left singular basis of a mode unfolding of the
//! original tensor; the core is the projection of the tensor onto the tensor
//! product of those bases.

use rayon::prelude::*;

use crate::cost::{self, Cost};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::svd::{truncated_svd, SingularSpectrum, TruncationRule};
use crate::tensor::{contract_mode, unfold, DenseTensor, Shape, UnfoldingSpec};

#[derive(Debug, Clone)]
pub struct TuckerDecomposition<T> {
    /// Core tensor with extents `(r_1, …, r_m)` in the weighted geometry.
    pub core: DenseTensor<T>,
    /// Orthonormal factors, `extent_j × r_j`.
    pub factors: Vec<Matrix<T>>,
    /// Full spectrum of every mode unfolding of the source tensor.
    pub mode_spectra: Vec<SingularSpectrum<T>>,
    /// Discarded energy per mode, `√(Σ_{α>r_j} λ_j(α))`.
    pub mode_tails: Vec<T>,
    shape: Shape,
    mode_weights: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> TuckerDecomposition<T> {
    pub fn ranks(&self) -> Vec<usize> {
        self.factors.iter().map(Matrix::cols).collect()
    }

    pub fn source_shape(&self) -> &Shape {
        &self.shape
    }

    /// `√(Σ_j tail_j²)`, the a-priori error bound.
    pub fn error_bound(&self) -> T {
        self.mode_tails.iter().map(|&t| t * t).sum::<T>().sqrt()
    }

    pub fn core_cost(&self) -> Cost {
        tucker_cost(&self.ranks())
    }

    /// Factor storage `Σ_j extent_j · r_j`.
    pub fn factor_storage(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| (f.rows() * f.cols()) as u64)
            .sum()
    }
}

pub fn hosvd<T: Scalar>(t: &DenseTensor<T>, ranks: &[usize]) -> Result<TuckerDecomposition<T>> {
    let ndim = t.ndim();
    if ranks.len() != ndim {
        return Err(Error::RankCount {
            expected: ndim,
            got: ranks.len(),
        });
    }
    let total = t.shape().len();
    for (j, (&r, &n)) in ranks.iter().zip(t.extents()).enumerate() {
        let max = n.min(total / n);
        if r == 0 || r > max {
            return Err(Error::RankInfeasible {
                position: j + 1,
                rank: r,
                max,
            });
        }
    }
    let rules: Vec<_> = ranks.iter().map(|&r| TruncationRule::FixedRank(r)).collect();
    build(t, &rules)
}

/// HOSVD with per-mode ranks chosen so that the overall bound
/// `√(Σ_j tail_j²)` is at most `tolerance · ‖t‖`.
pub fn hosvd_with_tolerance<T: Scalar>(t: &DenseTensor<T>, tolerance: T) -> Result<TuckerDecomposition<T>> {
    let per_mode = tolerance * t.frobenius_norm() / T::from_usize_lossy(t.ndim().max(1)).sqrt();
    let rules = vec![TruncationRule::TailEnergy(per_mode); t.ndim()];
    build(t, &rules)
}

fn build<T: Scalar>(t: &DenseTensor<T>, rules: &[TruncationRule<T>]) -> Result<TuckerDecomposition<T>> {
    let ndim = t.ndim();
    let scaled = DenseTensor::new(t.shape().clone(), t.scaled_values())?;
    let modes: Vec<_> = (0..ndim)
        .into_par_iter()
        .map(|j| {
            let m = unfold(&scaled, &UnfoldingSpec::mode(j, ndim))?;
            truncated_svd(&m, rules[j])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut core = scaled;
    for (j, m) in modes.iter().enumerate() {
        core = contract_mode(&core, &m.u.transpose(), j)?;
    }
    let mut factors = Vec::with_capacity(ndim);
    let mut mode_spectra = Vec::with_capacity(ndim);
    let mut mode_tails = Vec::with_capacity(ndim);
    for m in modes {
        mode_tails.push(m.tail);
        factors.push(m.u);
        mode_spectra.push(m.spectrum);
    }
    Ok(TuckerDecomposition {
        core,
        factors,
        mode_spectra,
        mode_tails,
        shape: t.shape().clone(),
        mode_weights: t.mode_weights().map(<[_]>::to_vec),
    })
}

pub fn tucker_reconstruct<T: Scalar>(d: &TuckerDecomposition<T>) -> Result<DenseTensor<T>> {
    let mut acc = d.core.clone();
    for (j, f) in d.factors.iter().enumerate() {
        acc = contract_mode(&acc, f, j)?;
    }
    DenseTensor::from_scaled(d.shape.clone(), acc.into_values(), d.mode_weights.clone())
}

/// Exact weighted Frobenius error `‖t − reconstruct(d)‖`.
pub fn tucker_error<T: Scalar>(t: &DenseTensor<T>, d: &TuckerDecomposition<T>) -> Result<T> {
    if t.extents() != d.shape.extents() {
        return Err(Error::DimensionMismatch(format!(
            "tensor {:?} vs decomposition {:?}",
            t.extents(),
            d.shape.extents()
        )));
    }
    t.distance(&tucker_reconstruct(d)?)
}

/// Core size `∏ r_j`.
pub fn tucker_cost(ranks: &[usize]) -> Cost {
    cost::product(ranks.iter().map(|&r| r as u64))
}
