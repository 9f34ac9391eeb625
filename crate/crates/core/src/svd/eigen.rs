//! Cyclic two-sided Jacobi eigenvalue iteration for symmetric matrices.
//!
//! Used as the Gram-matrix oracle. It shares no code path with the one-sided
//! SVD apart from the scalar trait.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix (unsorted, in diagonal order).
pub fn symmetric_eigenvalues<T: Scalar>(sym: &Matrix<T>) -> Vec<T> {
    let n = sym.rows();
    let mut a: Vec<T> = sym.as_slice().to_vec();
    let total: T = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    if total == T::zero() {
        return vec![T::zero(); n];
    }
    let threshold = T::epsilon() * total;
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (apq + apq);
                let t = if tau >= T::zero() {
                    (tau + (T::one() + tau * tau).sqrt()).recip()
                } else {
                    -(-tau + (T::one() + tau * tau).sqrt()).recip()
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                // A ← Jᵀ A J acting on rows/columns p and q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
