//! Dense-matrix helpers: norms, residuals and numerical rank.

use nalgebra::{DMatrix, DVector};

/// Bounded linear operator on R^p, realized as a dense p x p matrix.
pub type Operator = DMatrix<f64>;

/// The fiber norm ||v|| = |v_1| + ... + |v_p| used by every inequality check.
pub fn l1_norm(v: &DVector<f64>) -> f64 {
    v.iter().map(|a| a.abs()).sum()
}

/// Largest absolute entry.
pub fn max_abs(a: &Operator) -> f64 {
    a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Entrywise residual |a - b| / max(1, |a|, |b|).
///
/// Cocycle entries grow like e^{c (t - s)}, so a plain absolute difference is
/// meaningless at long horizons; the mixed absolute/relative form reduces to
/// the absolute difference for entries of order one.
pub fn operator_residual(a: &Operator, b: &Operator) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0f64, |acc, (&x, &y)| {
        let scale = 1.0f64.max(x.abs()).max(y.abs());
        acc.max((x - y).abs() / scale)
    })
}

/// Residual of the projection identity P^2 = P, as a max absolute entry.
pub fn idempotence_residual(p: &Operator) -> f64 {
    max_abs(&(p * p - p))
}

/// Numerical rank by singular-value thresholding.
pub fn rank(a: &Operator, tol: f64) -> usize {
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().filter(|&&s| s > tol).count()
}

/// Threshold used for ranks of floating-point projectors.
pub const RANK_SVD_TOL: f64 = 1e-8;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_norm_matches_hand_sum() {
        let v = DVector::from_vec(vec![1.0, -3.0, 2.0]);
        assert_eq!(l1_norm(&v), 6.0);
    }

    #[test]
    fn residual_is_absolute_for_small_entries() {
        let a = DMatrix::from_diagonal_element(2, 2, 1.0);
        let mut b = a.clone();
        b[(0, 0)] = 1.0 + 1e-7;
        assert!((operator_residual(&a, &b) - 1e-7).abs() < 1e-14);
    }

    #[test]
    fn residual_is_relative_for_large_entries() {
        let a = DMatrix::from_diagonal_element(1, 1, 1e50);
        let b = DMatrix::from_diagonal_element(1, 1, 1e50 * (1.0 + 1e-12));
        assert!(operator_residual(&a, &b) < 1e-11);
    }

    #[test]
    fn coordinate_projector_is_idempotent() {
        let p = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 1.0]));
        assert_eq!(idempotence_residual(&p), 0.0);
        assert_eq!(rank(&p, RANK_SVD_TOL), 2);
    }

    #[test]
    fn half_identity_is_not_idempotent() {
        let p = DMatrix::from_diagonal_element(2, 2, 0.5);
        assert!(idempotence_residual(&p) > 0.2);
    }
}
