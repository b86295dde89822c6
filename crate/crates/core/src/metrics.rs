//! Image similarity: SSIM with an 11×11 Gaussian window and normalised MSE.

use nalgebra::DMatrix;

use crate::error::{domain, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    /// Window side; images smaller than this on either side are compared
    /// with a single global window.
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    /// Pixel value range `L`.
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 1.0,
        }
    }
}

fn gaussian_kernel(n: usize, sigma: f64) -> Vec<f64> {
    let c = (n as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..n)
        .map(|i| (-(i as f64 - c).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Valid-mode separable filtering with the same 1-D kernel on both axes.
fn filter_valid(img: &DMatrix<f64>, k: &[f64]) -> DMatrix<f64> {
    let n = k.len();
    let (r, c) = img.shape();
    let (vr, vc) = (r + 1 - n, c + 1 - n);
    let rows = DMatrix::from_fn(vr, c, |i, j| (0..n).map(|t| k[t] * img[(i + t, j)]).sum::<f64>());
    DMatrix::from_fn(vr, vc, |i, j| (0..n).map(|t| k[t] * rows[(i, j + t)]).sum::<f64>())
}

fn global_mean(img: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, img.sum() / img.len() as f64)
}

/// Mean structural similarity of two equally sized images. Symmetric in
/// its arguments bit for bit, and exactly 1 for identical inputs.
pub fn ssim_with(a: &DMatrix<f64>, b: &DMatrix<f64>, p: &SsimParams) -> Result<f64> {
    if a.shape() != b.shape() {
        return invalid(format!("SSIM of {:?} and {:?} images", a.shape(), b.shape()));
    }
    if a.is_empty() {
        return invalid("SSIM of empty images");
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return domain("SSIM of non-finite pixels");
    }
    if !(p.sigma > 0.0 && p.dynamic_range > 0.0 && p.k1 > 0.0 && p.k2 > 0.0) || p.window == 0 {
        return invalid("SSIM parameters must be positive");
    }
    let ab = a.component_mul(b);
    let aa = a.component_mul(a);
    let bb = b.component_mul(b);
    let (ma, mb, mab, maa, mbb) = if a.nrows() < p.window || a.ncols() < p.window {
        (global_mean(a), global_mean(b), global_mean(&ab), global_mean(&aa), global_mean(&bb))
    } else {
        let k = gaussian_kernel(p.window, p.sigma);
        (
            filter_valid(a, &k),
            filter_valid(b, &k),
            filter_valid(&ab, &k),
            filter_valid(&aa, &k),
            filter_valid(&bb, &k),
        )
    };
    let c1 = (p.k1 * p.dynamic_range).powi(2);
    let c2 = (p.k2 * p.dynamic_range).powi(2);
    let mut total = 0.0;
    for i in 0..ma.len() {
        let (ua, ub) = (ma[i], mb[i]);
        let va = maa[i] - ua * ua;
        let vb = mbb[i] - ub * ub;
        let cov = mab[i] - ua * ub;
        let num = (2.0 * ua * ub + c1) * (2.0 * cov + c2);
        let den = (ua * ua + ub * ub + c1) * (va + vb + c2);
        total += num / den;
    }
    Ok(total / ma.len() as f64)
}

pub fn ssim(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    ssim_with(a, b, &SsimParams::default())
}

/// `‖estimate − reference‖² / ‖reference‖²`.
pub fn nmse(estimate: &DMatrix<f64>, reference: &DMatrix<f64>) -> Result<f64> {
    if estimate.shape() != reference.shape() {
        return invalid(format!(
            "NMSE of {:?} against {:?}",
            estimate.shape(),
            reference.shape()
        ));
    }
    let denom = reference.norm_squared();
    if denom == 0.0 {
        return domain("NMSE against an all-zero reference");
    }
    Ok((estimate - reference).norm_squared() / denom)
}
