//! Symmetric positive-definite solve for the small ridge systems (one row
//! per parameter). Solved in double precision whatever the scalar type.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

/// Solves `a · x = b` for symmetric positive-definite `a` (row-major, n×n).
/// Returns `None` when `a` is not numerically positive definite.
pub(crate) fn cholesky_solve<T: Scalar>(a: &[T], b: &[T], n: usize) -> Option<Vec<T>> {
    let to64 = |v: &T| v.to_f64().unwrap_or(f64::NAN);
    let m = DMatrix::from_row_iterator(n, n, a.iter().map(to64));
    let rhs = DVector::from_iterator(n, b.iter().map(to64));
    let x = m.cholesky()?.solve(&rhs);
    x.iter().all(|v| v.is_finite()).then(|| x.iter().map(|v| T::of(*v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [[4,2],[2,3]] x = [2,1]  ->  x = [0.5, 0]
        let x = cholesky_solve(&[4.0, 2.0, 2.0, 3.0], &[2.0, 1.0], 2).unwrap();
        assert!((x[0] - 0.5f64).abs() < 1e-12);
        assert!(x[1].abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(cholesky_solve(&[1.0f64, 2.0, 2.0, 1.0], &[1.0, 1.0], 2).is_none());
    }

    #[test]
    fn three_by_three_against_known_solution() {
        let a = [25.0f64, 15.0, -5.0, 15.0, 18.0, 0.0, -5.0, 0.0, 11.0];
        let x_true = [1.0, -2.0, 3.0];
        let b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * x_true[j]).sum()).collect();
        let x = cholesky_solve(&a, &b, 3).unwrap();
        for (got, want) in x.iter().zip(x_true) {
            assert!((got - want).abs() < 1e-10);
        }
    }
}
