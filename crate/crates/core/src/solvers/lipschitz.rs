use nalgebra::{DMatrix, DVector};

const REL_TOL: f64 = 1e-6;
const MAX_ITERS: usize = 5000;
const INFLATION: f64 = 1.01;
const FLOOR: f64 = 1e-12;

/// Upper estimate of the largest eigenvalue of `AᵀA` (the Lipschitz constant
/// of the gradient of `‖Y − A Z‖²/2`), by power iteration inflated by 1%.
///
/// A zero matrix yields a tiny positive floor so that `1/L` stays finite.
pub fn lipschitz_bound(a: &DMatrix<f64>) -> f64 {
    power_iteration(a.ncols(), |v| a.transpose() * (a * v))
}

/// As [`lipschitz_bound`] but from a precomputed symmetric Gram `AᵀA`.
pub fn lipschitz_bound_gram(gram: &DMatrix<f64>) -> f64 {
    power_iteration(gram.ncols(), |v| gram * v)
}

fn power_iteration(n: usize, apply: impl Fn(&DVector<f64>) -> DVector<f64>) -> f64 {
    if n == 0 {
        return FLOOR;
    }
    // Deterministic start with no special alignment to coordinate axes.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_7).fract());
    v /= v.norm();
    let mut theta = 0.0;
    for _ in 0..MAX_ITERS {
        let w = apply(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        v = w / norm;
        let done = (next - theta).abs() <= REL_TOL * next.abs();
        theta = next;
        if done {
            break;
        }
    }
    (theta * INFLATION).max(FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_identity() {
        let l = lipschitz_bound(&(DMatrix::<f64>::identity(6, 6) * 2.0));
        assert!((4.0..=4.04).contains(&l), "{l}");
    }

    #[test]
    fn diagonal() {
        let l = lipschitz_bound(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0])));
        assert!((9.0..=9.09).contains(&l), "{l}");
    }

    #[test]
    fn zero_matrix_gives_positive_floor() {
        let l = lipschitz_bound(&DMatrix::zeros(3, 4));
        assert!(l > 0.0 && l <= 1e-9);
    }

    #[test]
    fn gram_and_direct_agree() {
        let a = DMatrix::from_fn(8, 5, |i, j| ((i * 3 + j * 7) % 11) as f64 - 5.0);
        let g = a.transpose() * &a;
        let l1 = lipschitz_bound(&a);
        let l2 = lipschitz_bound_gram(&g);
        assert!((l1 - l2).abs() < 1e-6 * l1);
    }
}
