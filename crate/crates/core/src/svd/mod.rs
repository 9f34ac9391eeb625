//! Truncated SVD of unfoldings, the Gram-matrix oracle, tail energies and
//! decay-exponent estimation.

mod eigen;
mod hestenes;

pub use hestenes::{svd, Svd};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Fraction of the usable spectrum entering the default decay-fit window.
///
/// Discrete spectra follow the continuous law only for the leading modes
/// resolved by the grid; the tail flattens toward the grid scale.
pub const DEFAULT_FIT_FRACTION: f64 = 0.25;

/// Minimum number of values above the noise floor needed for a decay fit.
pub const MIN_FIT_VALUES: usize = 5;

/// Entries whose magnitude exceeds this decide the sign of a singular vector.
const SIGN_THRESHOLD: f64 = 1e-12;

/// Descending, nonnegative singular values `σ(1) ≥ σ(2) ≥ …`; `λ(α) = σ(α)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum<T> {
    values: Vec<T>,
}

impl<T: Scalar> SingularSpectrum<T> {
    /// Sorts descending and clips negative entries at zero.
    pub fn new(mut values: Vec<T>) -> Self {
        for v in &mut values {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lambdas(&self) -> Vec<T> {
        self.values.iter().map(|&s| s * s).collect()
    }

    /// Absolute level `noise_floor · σ(1)`.
    pub fn noise_threshold(&self) -> T {
        self.values.first().map_or(T::zero(), |&s| s * T::noise_floor())
    }

    pub fn is_noise(&self, index: usize) -> bool {
        let s = self.values[index];
        s == T::zero() || s < self.noise_threshold()
    }

    /// Number of leading values above the noise floor.
    pub fn usable_len(&self) -> usize {
        let floor = self.noise_threshold();
        self.values
            .iter()
            .take_while(|&&s| s > T::zero() && s >= floor)
            .count()
    }

    pub fn tail_energy(&self, r: usize) -> T {
        tail_energy(self, r)
    }

    pub fn total_energy(&self) -> T {
        tail_energy(self, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationRule<T> {
    FixedRank(usize),
    /// Keep the fewest terms whose discarded energy is at most the bound.
    TailEnergy(T),
    /// As `TailEnergy`, relative to the Frobenius norm of the matrix.
    RelativeTailEnergy(T),
}

#[derive(Debug, Clone)]
pub struct TruncatedSvd<T> {
    /// Leading left singular vectors (rows × rank).
    pub u: Matrix<T>,
    /// Full spectrum of the input matrix.
    pub spectrum: SingularSpectrum<T>,
    /// Leading right singular vectors (cols × rank).
    pub v: Matrix<T>,
    pub rank: usize,
    /// `√(Σ_{α>rank} σ(α)²)`, the exact Frobenius error of the truncation.
    pub tail: T,
}

impl<T: Scalar> TruncatedSvd<T> {
    pub fn kept_values(&self) -> &[T] {
        &self.spectrum.values()[..self.rank]
    }

    /// `u · diag(σ) · vᵀ` at the kept rank.
    pub fn reconstruct(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        us.scale_columns(self.kept_values());
        us.matmul(&self.v.transpose()).expect("consistent factors")
    }

    /// `diag(σ) · vᵀ` (rank × cols).
    pub fn sigma_vt(&self) -> Matrix<T> {
        let mut vt = self.v.transpose();
        vt.scale_rows(self.kept_values());
        vt
    }

    /// `u · diag(σ)` (rows × rank).
    pub fn u_sigma(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        us.scale_columns(self.kept_values());
        us
    }
}

pub fn truncated_svd<T: Scalar>(m: &Matrix<T>, rule: TruncationRule<T>) -> Result<TruncatedSvd<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite {
            index: m.as_slice().iter().position(|x| !x.is_finite()).unwrap_or(0),
        });
    }
    let Svd { mut u, sigma, mut v } = svd(m);
    let spectrum = SingularSpectrum { values: sigma };
    let full = spectrum.len();

    let rank = match rule {
        TruncationRule::FixedRank(r) => {
            if r > full {
                return Err(Error::RankInfeasible {
                    position: 0,
                    rank: r,
                    max: full,
                });
            }
            r
        }
        TruncationRule::TailEnergy(eps) => rank_for_tail(&spectrum, eps)?,
        TruncationRule::RelativeTailEnergy(eps) => rank_for_tail(&spectrum, eps * m.frobenius_norm())?,
    };

    apply_sign_convention(&mut u, &mut v);
    let tail = tail_energy(&spectrum, rank);
    Ok(TruncatedSvd {
        u: u.leading_columns(rank),
        spectrum,
        v: v.leading_columns(rank),
        rank,
        tail,
    })
}

fn rank_for_tail<T: Scalar>(spectrum: &SingularSpectrum<T>, eps: T) -> Result<usize> {
    if eps.is_nan() || eps < T::zero() {
        return Err(Error::InvalidSchedule(format!("tail-energy bound {eps} must be ≥ 0")));
    }
    let certified = spectrum.usable_len();
    let floor = tail_energy(spectrum, certified);
    if floor > eps {
        return Err(Error::BelowNoiseFloor {
            target: eps.to_f64().unwrap_or(f64::NAN),
            floor: floor.to_f64().unwrap_or(f64::NAN),
        });
    }
    let tails = suffix_tails(spectrum.values());
    Ok((0..=certified).find(|&r| tails[r] <= eps).unwrap_or(certified))
}

/// `tails[r] = √(Σ_{α≥r} σ_α²)` for `r = 0..=len`, accumulated from the small end.
fn suffix_tails<T: Scalar>(values: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    let mut out = vec![T::zero(); values.len() + 1];
    for (i, &s) in values.iter().enumerate().rev() {
        acc += s * s;
        out[i] = acc.sqrt();
    }
    out
}

/// First entry with `|x| > 1e-12` of every left vector is made positive.
fn apply_sign_convention<T: Scalar>(u: &mut Matrix<T>, v: &mut Matrix<T>) {
    let threshold = T::lit(SIGN_THRESHOLD);
    for j in 0..u.cols() {
        let pivot = (0..u.rows()).map(|i| u.get(i, j)).find(|x| x.abs() > threshold);
        if matches!(pivot, Some(p) if p < T::zero()) {
            for i in 0..u.rows() {
                u.set(i, j, -u.get(i, j));
            }
            for i in 0..v.rows() {
                v.set(i, j, -v.get(i, j));
            }
        }
    }
}

/// Eigenvalues of `mᵀm`, descending and clipped at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSpectrum<T> {
    pub eigenvalues: Vec<T>,
}

impl<T: Scalar> GramSpectrum<T> {
    /// `√λ`, comparable to the singular values of `m`.
    pub fn singular_values(&self) -> SingularSpectrum<T> {
        SingularSpectrum::new(self.eigenvalues.iter().map(|l| l.sqrt()).collect())
    }
}

/// Independent route to the spectrum through the Gram matrix `K = mᵀm`.
pub fn gram_spectrum<T: Scalar>(m: &Matrix<T>) -> GramSpectrum<T> {
    let gram = m.t_matmul(m).expect("Gram matrix is square");
    let mut eigenvalues = eigen::symmetric_eigenvalues(&gram);
    for l in &mut eigenvalues {
        if *l < T::zero() {
            *l = T::zero();
        }
    }
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    GramSpectrum { eigenvalues }
}

/// `√(Σ_{α>r} σ(α)²)`.
pub fn tail_energy<T: Scalar>(spectrum: &SingularSpectrum<T>, r: usize) -> T {
    let values = spectrum.values();
    if r >= values.len() {
        return T::zero();
    }
    values[r..]
        .iter()
        .rev()
        .fold(T::zero(), |acc, &s| acc + s * s)
        .sqrt()
}

/// Least-squares fit `log λ(α) ≈ c + exponent · log α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub r2: f64,
    /// One-based inclusive range of α used.
    pub window: (usize, usize),
}

/// Fits the λ-decay exponent over `α ∈ [2, max(5, ⌈usable/4⌉)]`.
pub fn fit_decay_exponent<T: Scalar>(spectrum: &SingularSpectrum<T>) -> Result<DecayFit> {
    let usable = spectrum.usable_len();
    if usable < MIN_FIT_VALUES {
        return Err(Error::InsufficientSpectrum {
            needed: MIN_FIT_VALUES,
            found: usable,
        });
    }
    let resolved = (usable as f64 * DEFAULT_FIT_FRACTION).ceil() as usize;
    let last = resolved.max(MIN_FIT_VALUES).min(usable);
    fit_decay_exponent_window(spectrum, 2, last)
}

/// Decay fit over the explicit one-based window `first..=last`.
pub fn fit_decay_exponent_window<T: Scalar>(
    spectrum: &SingularSpectrum<T>,
    first: usize,
    last: usize,
) -> Result<DecayFit> {
    let usable = spectrum.usable_len();
    if first < 1 || last > usable || last < first + 3 {
        return Err(Error::InsufficientSpectrum {
            needed: first.max(1) + 3,
            found: usable.min(last),
        });
    }
    let points: Vec<(f64, f64)> = (first..=last)
        .map(|alpha| {
            let s = spectrum.values()[alpha - 1].to_f64().unwrap_or(f64::NAN);
            ((alpha as f64).ln(), 2.0 * s.ln())
        })
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let exponent = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(DecayFit {
        exponent,
        r2,
        window: (first, last),
    })
}

/// Both sides of `‖m − P m‖² = trace(mᵀm) − trace((Pm)ᵀ(Pm))`, with `P` the
/// projector onto the top-`r` left singular vectors.
pub fn projection_trace_check<T: Scalar>(m: &Matrix<T>, r: usize) -> Result<(T, T)> {
    if r == 0 || r > m.rows() {
        return Err(Error::RankInfeasible {
            position: 0,
            rank: r,
            max: m.rows(),
        });
    }
    let r = r.min(m.rows().min(m.cols()));
    let t = truncated_svd(m, TruncationRule::FixedRank(r))?;
    let coeffs = t.u.t_matmul(m)?;
    let pm = t.u.matmul(&coeffs)?;
    let lhs = m.sub(&pm)?.frobenius_norm_sq();
    let rhs = m.t_matmul(m)?.trace() - pm.t_matmul(&pm)?.trace();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag321() -> Matrix<f64> {
        Matrix::diag(&[3.0, 2.0, 1.0])
    }

    #[test]
    fn fixed_rank_on_diagonal() {
        let t = truncated_svd(&diag321(), TruncationRule::FixedRank(2)).unwrap();
        assert_eq!(t.kept_values(), &[3.0, 2.0]);
        assert!((t.tail - 1.0).abs() < 1e-15);
        assert!(t.u.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn outer_product_is_rank_one() {
        let u = [1.0, -2.0, 2.0];
        let v = [3.0, 4.0];
        let m = Matrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let t = truncated_svd(&m, TruncationRule::RelativeTailEnergy(1e-12)).unwrap();
        assert_eq!(t.rank, 1);
        assert!((t.spectrum.values()[0] - 15.0f64).abs() < 1e-13);
        assert!(t.tail < 1e-14);
    }

    #[test]
    fn sign_convention_makes_first_entry_positive() {
        let m = Matrix::from_vec(2, 2, vec![-1.0, 0.0, 0.0, -2.0]).unwrap();
        let t = truncated_svd(&m, TruncationRule::FixedRank(2)).unwrap();
        for j in 0..2 {
            let first = (0..2).map(|i| t.u.get(i, j)).find(|x: &f64| x.abs() > 1e-12).unwrap();
            assert!(first > 0.0);
        }
        let rec = t.reconstruct();
        assert!(rec.sub(&m).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn rank_above_size_is_infeasible() {
        assert!(matches!(
            truncated_svd(&diag321(), TruncationRule::FixedRank(4)),
            Err(Error::RankInfeasible { max: 3, .. })
        ));
    }

    #[test]
    fn tail_rule_below_noise_floor_reports_floor() {
        // σ = (1, 1e-15): the second value is noise, so an exact fit cannot be certified
        let m = Matrix::diag(&[1.0, 1e-15]);
        match truncated_svd(&m, TruncationRule::TailEnergy(1e-16)) {
            Err(Error::BelowNoiseFloor { floor, .. }) => assert!((floor - 1e-15).abs() < 1e-25),
            other => panic!("unexpected {other:?}"),
        }
        let ok = truncated_svd(&m, TruncationRule::TailEnergy(1e-14)).unwrap();
        assert_eq!(ok.rank, 1);
    }

    #[test]
    fn zero_matrix_has_orthonormal_completion() {
        let m = Matrix::<f64>::zeros(4, 3);
        let t = truncated_svd(&m, TruncationRule::FixedRank(3)).unwrap();
        assert!(t.u.orthonormality_defect() < 1e-15);
        assert!(t.v.orthonormality_defect() < 1e-15);
        assert_eq!(t.tail, 0.0);
    }

    #[test]
    fn gram_spectrum_small_cases() {
        assert_eq!(gram_spectrum(&Matrix::<f64>::identity(3)).eigenvalues, vec![1.0; 3]);
        let g = gram_spectrum(&diag321()).eigenvalues;
        for (a, b) in g.iter().zip([9.0, 4.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_energy_cases() {
        let s = SingularSpectrum::new(vec![3.0, 2.0, 1.0]);
        assert_eq!(tail_energy(&s, 3), 0.0);
        assert_eq!(tail_energy(&s, 7), 0.0);
        assert!((tail_energy(&s, 1) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decay_fit_exact_power_law() {
        let s = SingularSpectrum::new((1..=20).map(|a| (a as f64).powf(-1.5)).collect());
        let fit = fit_decay_exponent(&s).unwrap();
        assert!((fit.exponent + 3.0).abs() < 1e-6);
        assert!(fit.r2 > 0.999_999);
        assert_eq!(fit.window.0, 2);
    }

    #[test]
    fn decay_fit_rejects_rank_one() {
        let s = SingularSpectrum::new(vec![1.0, 0.0, 0.0]);
        assert!(matches!(
            fit_decay_exponent(&s),
            Err(Error::InsufficientSpectrum { found: 1, .. })
        ));
    }

    #[test]
    fn trace_check_small_cases() {
        let (l, r) = projection_trace_check(&diag321(), 3).unwrap();
        assert!(l.abs() < 1e-15 && r.abs() < 1e-14);
        let (l, r) = projection_trace_check(&diag321(), 2).unwrap();
        assert!((l - 1.0).abs() < 1e-14 && (r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn works_for_f32() {
        let m = Matrix::<f32>::diag(&[4.0, 1.0]);
        let t = truncated_svd(&m, TruncationRule::FixedRank(1)).unwrap();
        assert_eq!(t.kept_values(), &[4.0]);
        assert_eq!(t.tail, 1.0);
    }
}
