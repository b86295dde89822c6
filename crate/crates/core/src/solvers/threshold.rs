use nalgebra::DMatrix;

use crate::error::{domain, Result};

#[inline]
pub(crate) fn shrink(v: f64, theta: f64) -> f64 {
    if v > theta {
        v - theta
    } else if v < -theta {
        v + theta
    } else {
        0.0
    }
}

/// Elementwise `sign(v) * max(|v| - theta, 0)`.
pub fn soft_threshold(v: &[f64], theta: f64) -> Result<Vec<f64>> {
    if !(theta >= 0.0) {
        return domain(format!("threshold must be non-negative, got {theta}"));
    }
    Ok(v.iter().map(|&x| shrink(x, theta)).collect())
}

/// In-place soft thresholding of every entry of a matrix.
pub fn soft_threshold_matrix(m: &mut DMatrix<f64>, theta: f64) -> Result<()> {
    if !(theta >= 0.0) {
        return domain(format!("threshold must be non-negative, got {theta}"));
    }
    m.iter_mut().for_each(|x| *x = shrink(*x, theta));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn definition_example() {
        assert_eq!(soft_threshold(&[3.0, -0.5, 1.0], 1.0).unwrap(), vec![2.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_threshold_is_identity() {
        let v = [1.5, -2.25, 0.0, 1e-300];
        assert_eq!(soft_threshold(&v, 0.0).unwrap(), v.to_vec());
    }

    #[test]
    fn full_shrinkage() {
        let v = [0.3, -0.7, 0.69];
        assert!(soft_threshold(&v, 0.7).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn negative_threshold_rejected() {
        assert!(matches!(
            soft_threshold(&[1.0], -1e-3),
            Err(crate::Error::Domain(_))
        ));
        assert!(soft_threshold(&[1.0], f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn odd_and_nonexpansive(
            u in prop::collection::vec(-10.0f64..10.0, 1..16),
            shift in prop::collection::vec(-10.0f64..10.0, 16),
            theta in 0.0f64..5.0,
        ) {
            let v: Vec<f64> = u.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let su = soft_threshold(&u, theta).unwrap();
            let sv = soft_threshold(&v, theta).unwrap();
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            let sneg = soft_threshold(&neg, theta).unwrap();
            for (a, b) in su.iter().zip(&sneg) {
                prop_assert_eq!(*a, -*b);
            }
            let d_out: f64 = su.iter().zip(&sv).map(|(a, b)| (a - b).powi(2)).sum();
            let d_in: f64 = u.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum();
            prop_assert!(d_out.sqrt() <= d_in.sqrt() + 1e-12);
        }
    }
}
