//! Tensor-train construction by chained, vector-valued SVDs.
//!
//! Step `j` separates the stacked pair (bond `α_{j-1}`, mode `j`) from the
//! remaining modes. The singular values travel with the remainder, so every
//! core left of the last one is left-orthonormal.

use crate::cost::{self, Cost};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::svd::{truncated_svd, SingularSpectrum, TruncatedSvd, TruncationRule};
use crate::tensor::{inverse_permutation, DenseTensor, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Bookkeeping for one separation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TtStep {
    /// One-based bond index `j` (between modes `j` and `j+1`).
    pub bond: usize,
    pub direction: Direction,
    pub rows: usize,
    pub cols: usize,
    /// Size of the stacked side: bond rank times the extent of the separated mode.
    pub stacked_dim: usize,
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct TtDecomposition<T> {
    /// Core `j` has extents `(r_{j-1}, extent_j, r_j)` with `r_0 = r_m = 1`.
    pub cores: Vec<DenseTensor<T>>,
    /// Spectrum of every separation, in bond order.
    pub spectra: Vec<SingularSpectrum<T>>,
    /// Discarded energy of every separation, in bond order.
    pub tails: Vec<T>,
    /// Steps in execution order.
    pub steps: Vec<TtStep>,
    /// `Some(order)` when modes were reordered before decomposition; core `k`
    /// then belongs to source mode `order[k]`.
    pub permutation: Option<Vec<usize>>,
    shape: Shape,
    mode_weights: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> TtDecomposition<T> {
    pub fn ranks(&self) -> Vec<usize> {
        self.cores
            .iter()
            .take(self.cores.len().saturating_sub(1))
            .map(|c| c.extents()[2])
            .collect()
    }

    pub fn error_bound(&self) -> T {
        self.tails.iter().map(|&t| t * t).sum::<T>().sqrt()
    }

    pub fn cost(&self) -> Cost {
        tt_cost(&self.ranks())
    }

    /// Grid-inclusive storage `Σ_j r_{j-1} · extent_j · r_j`.
    pub fn storage(&self) -> u64 {
        self.cores.iter().map(|c| c.shape().len() as u64).sum()
    }

    /// Largest deviation from left-orthonormality over cores `1..m-1`.
    pub fn left_orthogonality_defect(&self) -> T {
        self.cores
            .iter()
            .take(self.cores.len().saturating_sub(1))
            .map(|c| core_matrix(c).orthonormality_defect())
            .fold(T::zero(), T::max)
    }
}

fn core_matrix<T: Scalar>(core: &DenseTensor<T>) -> Matrix<T> {
    let e = core.extents();
    Matrix::from_vec(e[0] * e[1], e[2], core.values().to_vec()).expect("core layout")
}

fn core_tensor<T: Scalar>(left: usize, n: usize, right: usize, data: Vec<T>) -> Result<DenseTensor<T>> {
    DenseTensor::new(Shape::new(vec![left, n, right])?, data)
}

#[derive(Clone, Copy)]
enum StepRule<T> {
    Rank(usize),
    Tail(T),
}

/// Checks `ranks[j] ≤ min(r_{j-1}·extent_j, ∏_{i>j} extent_i)` with `r_0 = 1`.
fn validate_ranks(extents: &[usize], ranks: &[usize]) -> Result<()> {
    let m = extents.len();
    let expected = m.saturating_sub(1);
    if ranks.len() != expected {
        return Err(Error::RankCount {
            expected,
            got: ranks.len(),
        });
    }
    let mut prev = 1usize;
    for (j, &r) in ranks.iter().enumerate() {
        let rest: usize = extents[j + 1..].iter().product();
        let max = (prev * extents[j]).min(rest);
        if r == 0 || r > max {
            return Err(Error::RankInfeasible {
                position: j + 1,
                rank: r,
                max,
            });
        }
        prev = r;
    }
    Ok(())
}

fn separate<T: Scalar>(data: Vec<T>, rows: usize, cols: usize, rule: StepRule<T>, bond: usize) -> Result<TruncatedSvd<T>> {
    let mat = Matrix::from_vec(rows, cols, data)?;
    let rule = match rule {
        StepRule::Rank(r) => {
            let max = rows.min(cols);
            if r == 0 || r > max {
                return Err(Error::RankInfeasible {
                    position: bond,
                    rank: r,
                    max,
                });
            }
            TruncationRule::FixedRank(r)
        }
        StepRule::Tail(eps) => TruncationRule::TailEnergy(eps),
    };
    let mut out = truncated_svd(&mat, rule)?;
    // keep at least one term so the chain stays connected
    if out.rank == 0 {
        out = truncated_svd(&mat, TruncationRule::FixedRank(1))?;
    }
    Ok(out)
}

/// Left-to-right TT-SVD with the given bond ranks `r_1 … r_{m-1}`.
pub fn tt_svd<T: Scalar>(t: &DenseTensor<T>, ranks: &[usize]) -> Result<TtDecomposition<T>> {
    validate_ranks(t.extents(), ranks)?;
    let rules: Vec<_> = ranks.iter().map(|&r| StepRule::Rank(r)).collect();
    forward(t, &rules)
}

/// Left-to-right TT-SVD whose per-step tails keep the overall bound at most
/// `tolerance · ‖t‖`.
pub fn tt_svd_with_tolerance<T: Scalar>(t: &DenseTensor<T>, tolerance: T) -> Result<TtDecomposition<T>> {
    let steps = t.ndim().saturating_sub(1).max(1);
    let per_step = tolerance * t.frobenius_norm() / T::from_usize_lossy(steps).sqrt();
    let rules = vec![StepRule::Tail(per_step); t.ndim().saturating_sub(1)];
    forward(t, &rules)
}

/// Reorders modes so that the subdomain dimensions `dims` are ascending
/// (stable), then runs [`tt_svd`]. `ranks` refer to the reordered chain.
pub fn tt_svd_ordered<T: Scalar>(t: &DenseTensor<T>, dims: &[usize], ranks: &[usize]) -> Result<TtDecomposition<T>> {
    if dims.len() != t.ndim() {
        return Err(Error::DimensionMismatch(format!(
            "{} subdomain dimensions for {} modes",
            dims.len(),
            t.ndim()
        )));
    }
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.sort_by_key(|&k| dims[k]);
    let permuted = t.permute(&order)?;
    let mut d = tt_svd(&permuted, ranks)?;
    d.permutation = Some(order);
    d.shape = t.shape().clone();
    d.mode_weights = t.mode_weights().map(<[_]>::to_vec);
    Ok(d)
}

fn forward<T: Scalar>(t: &DenseTensor<T>, rules: &[StepRule<T>]) -> Result<TtDecomposition<T>> {
    let extents = t.extents().to_vec();
    let m = extents.len();
    let mut remainder = t.scaled_values();
    let mut cores = Vec::with_capacity(m);
    let mut spectra = Vec::with_capacity(m.saturating_sub(1));
    let mut tails = Vec::with_capacity(m.saturating_sub(1));
    let mut steps = Vec::with_capacity(m.saturating_sub(1));
    let mut prev = 1usize;
    for (j, rule) in rules.iter().enumerate() {
        let rows = prev * extents[j];
        let cols: usize = extents[j + 1..].iter().product();
        let s = separate(remainder, rows, cols, *rule, j + 1)?;
        steps.push(TtStep {
            bond: j + 1,
            direction: Direction::Forward,
            rows,
            cols,
            stacked_dim: rows,
            rank: s.rank,
        });
        remainder = s.sigma_vt().into_vec();
        cores.push(core_tensor(prev, extents[j], s.rank, s.u.into_vec())?);
        tails.push(s.tail);
        spectra.push(s.spectrum);
        prev = s.rank;
    }
    cores.push(core_tensor(prev, extents[m - 1], 1, remainder)?);
    Ok(TtDecomposition {
        cores,
        spectra,
        tails,
        steps,
        permutation: None,
        shape: t.shape().clone(),
        mode_weights: t.mode_weights().map(<[_]>::to_vec),
    })
}

/// Two-sided TT-SVD: the first `⌈(m−1)/2⌉` separations run left to right, the
/// rest right to left on the remainder. The cores are then re-orthogonalised
/// from the meeting point onward so the result is left-orthonormal like
/// [`tt_svd`].
pub fn tt_svd_bidirectional<T: Scalar>(t: &DenseTensor<T>, ranks: &[usize]) -> Result<TtDecomposition<T>> {
    let extents = t.extents().to_vec();
    validate_ranks(&extents, ranks)?;
    let m = extents.len();
    if m <= 2 {
        return tt_svd(t, ranks);
    }
    let n_forward = (m - 1).div_ceil(2);

    let mut remainder = t.scaled_values();
    let mut left_cores = Vec::with_capacity(n_forward);
    let mut spectra: Vec<Option<SingularSpectrum<T>>> = vec![None; m - 1];
    let mut tails = vec![T::zero(); m - 1];
    let mut steps = Vec::with_capacity(m - 1);
    let mut prev = 1usize;
    for j in 0..n_forward {
        let rows = prev * extents[j];
        let cols: usize = extents[j + 1..].iter().product();
        let s = separate(remainder, rows, cols, StepRule::Rank(ranks[j]), j + 1)?;
        steps.push(TtStep {
            bond: j + 1,
            direction: Direction::Forward,
            rows,
            cols,
            stacked_dim: rows,
            rank: s.rank,
        });
        remainder = s.sigma_vt().into_vec();
        left_cores.push(core_tensor(prev, extents[j], s.rank, s.u.into_vec())?);
        tails[j] = s.tail;
        spectra[j] = Some(s.spectrum);
        prev = s.rank;
    }

    // remainder now has extents (prev, n_{f}, …, n_{m-1}) in zero-based modes
    let mut right_cores = Vec::with_capacity(m - n_forward);
    let mut next = 1usize;
    for j in (n_forward + 1..m).rev() {
        let cols = extents[j] * next;
        let rows = remainder.len() / cols;
        let s = separate(remainder, rows, cols, StepRule::Rank(ranks[j - 1]), j)?;
        steps.push(TtStep {
            bond: j,
            direction: Direction::Backward,
            rows,
            cols,
            stacked_dim: cols,
            rank: s.rank,
        });
        let vt = s.v.transpose();
        right_cores.push(core_tensor(s.rank, extents[j], next, vt.into_vec())?);
        remainder = s.u_sigma().into_vec();
        tails[j - 1] = s.tail;
        spectra[j - 1] = Some(s.spectrum);
        next = s.rank;
    }
    let middle = core_tensor(prev, extents[n_forward], next, remainder)?;

    let mut cores = left_cores;
    cores.push(middle);
    cores.extend(right_cores.into_iter().rev());
    left_orthogonalize_from(&mut cores, n_forward)?;

    Ok(TtDecomposition {
        cores,
        spectra: spectra.into_iter().map(|s| s.expect("every bond separated")).collect(),
        tails,
        steps,
        permutation: None,
        shape: t.shape().clone(),
        mode_weights: t.mode_weights().map(<[_]>::to_vec),
    })
}

/// Moves the non-orthogonal factor from core `start` to the last core.
fn left_orthogonalize_from<T: Scalar>(cores: &mut [DenseTensor<T>], start: usize) -> Result<()> {
    for j in start..cores.len() - 1 {
        let e = cores[j].extents().to_vec();
        let s = truncated_svd(&core_matrix(&cores[j]), TruncationRule::FixedRank(e[2]))?;
        let carry = s.sigma_vt();
        cores[j] = core_tensor(e[0], e[1], e[2], s.u.into_vec())?;
        let ne = cores[j + 1].extents().to_vec();
        let next = Matrix::from_vec(ne[0], ne[1] * ne[2], cores[j + 1].values().to_vec())?;
        cores[j + 1] = core_tensor(carry.rows(), ne[1], ne[2], carry.matmul(&next)?.into_vec())?;
    }
    Ok(())
}

pub fn tt_reconstruct<T: Scalar>(d: &TtDecomposition<T>) -> Result<DenseTensor<T>> {
    let first = d
        .cores
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty core chain".into()))?;
    if first.extents()[0] != 1 {
        return Err(Error::DimensionMismatch("first core must have left rank 1".into()));
    }
    let mut acc = Matrix::from_vec(1, first.extents()[0], vec![T::one()])?;
    let mut extents = Vec::with_capacity(d.cores.len());
    for core in &d.cores {
        let e = core.extents();
        if acc.cols() != e[0] {
            return Err(Error::DimensionMismatch(format!(
                "bond mismatch: {} vs {}",
                acc.cols(),
                e[0]
            )));
        }
        let cm = Matrix::from_vec(e[0], e[1] * e[2], core.values().to_vec())?;
        let prod = acc.matmul(&cm)?;
        acc = Matrix::from_vec(prod.rows() * e[1], e[2], prod.into_vec())?;
        extents.push(e[1]);
    }
    if acc.cols() != 1 {
        return Err(Error::DimensionMismatch("last core must have right rank 1".into()));
    }
    let values = acc.into_vec();
    match &d.permutation {
        None => DenseTensor::from_scaled(d.shape.clone(), values, d.mode_weights.clone()),
        Some(order) => {
            let chained = DenseTensor::new(Shape::new(extents)?, values)?;
            let restored = chained.permute(&inverse_permutation(order))?;
            DenseTensor::from_scaled(d.shape.clone(), restored.into_values(), d.mode_weights.clone())
        }
    }
}

/// Exact weighted Frobenius error `‖t − reconstruct(d)‖`.
pub fn tt_error<T: Scalar>(t: &DenseTensor<T>, d: &TtDecomposition<T>) -> Result<T> {
    t.distance(&tt_reconstruct(d)?)
}

/// Rank-entry count `r_1 + Σ_{j=2}^{m-1} r_{j-1} r_j`.
pub fn tt_cost(ranks: &[usize]) -> Cost {
    let Some(&first) = ranks.first() else {
        return Cost::ZERO;
    };
    let pairs = ranks.windows(2).map(|w| cost::pair_mul(w[0] as u64, w[1] as u64));
    cost::sum(std::iter::once(Cost::exact(first as u64)).chain(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable(factors: &[Vec<f64>]) -> DenseTensor<f64> {
        let shape = Shape::new(factors.iter().map(Vec::len).collect()).unwrap();
        DenseTensor::from_fn(shape, |idx| idx.iter().zip(factors).map(|(&i, f)| f[i]).product()).unwrap()
    }

    #[test]
    fn rank_one_chain() {
        let t = separable(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5], vec![2.0, 1.0, 1.0, 4.0]]);
        for d in [tt_svd(&t, &[1, 1]).unwrap(), tt_svd_bidirectional(&t, &[1, 1]).unwrap()] {
            assert_eq!(d.ranks(), vec![1, 1]);
            assert!(tt_error(&t, &d).unwrap() < 1e-12 * t.frobenius_norm());
        }
    }

    #[test]
    fn single_mode_chain_is_the_core() {
        let t = DenseTensor::new(Shape::new(vec![4]).unwrap(), vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        let d = tt_svd(&t, &[]).unwrap();
        assert_eq!(d.cores.len(), 1);
        assert_eq!(d.cores[0].values(), t.values());
        assert_eq!(tt_reconstruct(&d).unwrap().values(), t.values());
    }

    #[test]
    fn rank_one_cores_give_outer_product() {
        let a = [1.0, 2.0];
        let b = [3.0, -1.0, 0.5];
        let d = TtDecomposition {
            cores: vec![
                core_tensor(1, 2, 1, a.to_vec()).unwrap(),
                core_tensor(1, 3, 1, b.to_vec()).unwrap(),
            ],
            spectra: vec![],
            tails: vec![],
            steps: vec![],
            permutation: None,
            shape: Shape::new(vec![2, 3]).unwrap(),
            mode_weights: None,
        };
        let r = tt_reconstruct(&d).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(r.get(&[i, j]), a[i] * b[j]);
            }
        }
    }

    #[test]
    fn infeasible_rank_reports_maximum() {
        let t = separable(&[vec![1.0; 2], vec![1.0; 3], vec![1.0; 4]]);
        assert!(matches!(
            tt_svd(&t, &[3, 1]),
            Err(Error::RankInfeasible { position: 1, max: 2, .. })
        ));
        assert!(matches!(
            tt_svd(&t, &[2, 5]),
            Err(Error::RankInfeasible { position: 2, max: 4, .. })
        ));
        assert!(matches!(tt_svd(&t, &[2]), Err(Error::RankCount { expected: 2, .. })));
    }

    #[test]
    fn cost_examples() {
        assert_eq!(tt_cost(&[5]), Cost::exact(5));
        assert_eq!(tt_cost(&[10, 100]), Cost::exact(1010));
        assert_eq!(tt_cost(&[]), Cost::ZERO);
        assert!(tt_cost(&[usize::MAX, 2]).saturated);
    }
}
