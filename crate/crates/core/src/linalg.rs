//! Small dense helpers shared by validation, the null-space basis and the cost model.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

/// Relative tolerance for declaring a pivoted column dependent.
pub(crate) const RANK_RTOL: f64 = 1e-10;

/// Greedy column selection by largest remaining norm (QR with column pivoting,
/// modified Gram-Schmidt). Returns the chosen column indices in pivot order;
/// stops early when the remaining columns are numerically dependent.
///
/// Ties on the residual norm go to the lowest column index.
pub(crate) fn pivoted_columns(a: &DMatrix<f64>, want: usize) -> Vec<usize> {
    let (m, n) = a.shape();
    let mut work = a.clone();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let tol = RANK_RTOL * scale * (m.max(n) as f64).sqrt();
    let mut chosen = Vec::with_capacity(want.min(m));
    let mut used = vec![false; n];
    for _ in 0..want.min(m) {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..n).filter(|&j| !used[j]) {
            let norm = work.column(j).norm();
            if best.is_none_or(|(_, b)| norm > b) {
                best = Some((j, norm));
            }
        }
        let Some((pivot, norm)) = best else { break };
        if norm <= tol {
            break;
        }
        used[pivot] = true;
        chosen.push(pivot);
        let q = work.column(pivot) / norm;
        for j in (0..n).filter(|&j| !used[j]) {
            let proj = q.dot(&work.column(j));
            work.column_mut(j).axpy(-proj, &q, 1.0);
        }
    }
    chosen
}

/// Numerical rank of `a` via pivoted Gram-Schmidt.
pub(crate) fn numerical_rank(a: &DMatrix<f64>) -> usize {
    pivoted_columns(a, a.nrows()).len()
}

/// Semidefinite check by attempting a Cholesky factorization of `q + tol*I`
/// with `tol = rtol * ||q||_F`.
pub(crate) fn is_psd(q: &DMatrix<f64>, rtol: f64) -> bool {
    let frob = q.norm();
    if frob == 0.0 {
        return true;
    }
    let shifted = q + DMatrix::identity(q.nrows(), q.ncols()) * (rtol * frob);
    Cholesky::new(shifted).is_some()
}

/// Largest eigenvalue of a symmetric matrix (0 for an empty matrix).
pub(crate) fn max_eigenvalue(q: &DMatrix<f64>) -> f64 {
    if q.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(q.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// 2-norm condition number `sigma_max / sigma_min` over the `min(rows, cols)`
/// singular values. Infinite when the smallest one vanishes.
pub(crate) fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(crate) fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_by_hand_elimination() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        assert_eq!(numerical_rank(&a), 1);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(numerical_rank(&b), 1);
    }

    #[test]
    fn psd_detection() {
        let psd = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(is_psd(&psd, 1e-10));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(!is_psd(&indefinite, 1e-10));
        assert!(is_psd(&DMatrix::zeros(3, 3), 1e-10));
    }

    #[test]
    fn pivoting_prefers_largest_then_lowest_index() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 3.0, 0.0, 1.0, 0.0]);
        assert_eq!(pivoted_columns(&a, 2), vec![2, 1]);
    }
}
