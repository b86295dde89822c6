//! Numerical kernels shared by every autoencoder variant: soft thresholding,
//! ridge-stabilised least squares, a power-iteration Lipschitz estimate and
//! ISTA for l1-regularised least squares.

mod ista;
mod least_squares;
mod lipschitz;
mod threshold;

pub use ista::{ista_solve, ista_solve_gram, IstaOptions, IstaReport, StepSize};
pub use least_squares::{default_ridge, solve_least_squares, LeastSquaresFactor, Ridge};
pub use lipschitz::{lipschitz_bound, lipschitz_bound_gram};
pub use threshold::{soft_threshold, soft_threshold_matrix};

use nalgebra::DMatrix;

use crate::error::{domain, Result};

pub(crate) fn ensure_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        domain(format!("{what} contains non-finite entries"))
    }
}

/// `C = A * B` through matrixmultiply directly so that each output column is
/// computed by the same kernel regardless of how many columns `B` has.
pub(crate) fn gemm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, k) = a.shape();
    let n = b.ncols();
    assert_eq!(k, b.nrows(), "gemm inner dimension");
    let mut c = DMatrix::<f64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // Column-major storage: row stride 1, column stride = nrows.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}

/// `Aᵀ * B` without nalgebra's slow transposed-product path.
pub(crate) fn gemm_tn(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (k, m) = a.shape();
    let n = b.ncols();
    assert_eq!(k, b.nrows(), "gemm_tn inner dimension");
    let mut c = DMatrix::<f64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // Reading A with swapped strides yields its transpose.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}

/// `A * Bᵀ`.
pub(crate) fn gemm_nt(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, k) = a.shape();
    let n = b.nrows();
    assert_eq!(k, b.ncols(), "gemm_nt inner dimension");
    let mut c = DMatrix::<f64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            n as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gemm_variants_match_nalgebra() {
        let a = DMatrix::from_fn(7, 5, |i, j| (i as f64 - 2.0 * j as f64).sin());
        let b = DMatrix::from_fn(5, 9, |i, j| (i as f64 * 0.3 + j as f64).cos());
        let c = DMatrix::from_fn(7, 9, |i, j| (i + j) as f64 * 0.1);
        assert!((gemm(&a, &b) - &a * &b).norm() < 1e-12);
        assert!((gemm_tn(&c, &a) - c.transpose() * &a).norm() < 1e-12);
        assert!((gemm_nt(&a, &a) - &a * a.transpose()).norm() < 1e-12);
    }
}
