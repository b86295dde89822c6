//! Classical per-image denoisers used as reference points: truncated SVD
//! and hard-thresholded orthonormal Haar wavelets.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::synth::ImageStack;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdFilterConfig {
    /// Fixed rank; `None` picks the smallest rank reaching `energy`.
    pub rank: Option<usize>,
    /// Fraction of the squared singular-value mass to keep.
    pub energy: f64,
}

impl Default for SvdFilterConfig {
    fn default() -> Self {
        Self {
            rank: None,
            energy: 0.95,
        }
    }
}

/// Smallest `k` with `Σ_{i<k} s_i² ≥ energy · Σ s_i²` (`s` descending).
pub fn energy_rank(singular_values: &[f64], energy: f64) -> usize {
    let total: f64 = singular_values.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return 0;
    }
    let mut acc = 0.0;
    for (i, s) in singular_values.iter().enumerate() {
        acc += s * s;
        if acc >= energy * total {
            return i + 1;
        }
    }
    singular_values.len()
}

/// Best rank-`k` approximation of `img`.
pub fn svd_denoise_image(img: &DMatrix<f64>, cfg: &SvdFilterConfig) -> Result<DMatrix<f64>> {
    if !(cfg.energy > 0.0 && cfg.energy <= 1.0) {
        return invalid(format!("SVD energy fraction {} outside (0, 1]", cfg.energy));
    }
    let min_dim = img.nrows().min(img.ncols());
    if let Some(k) = cfg.rank {
        if k == 0 || k > min_dim {
            return invalid(format!("SVD rank {k} outside 1..={min_dim}"));
        }
    }
    let svd = img.clone().svd(true, true);
    let mut s: Vec<(usize, f64)> = svd.singular_values.iter().copied().enumerate().collect();
    s.sort_by(|a, b| b.1.total_cmp(&a.1));
    let sorted: Vec<f64> = s.iter().map(|v| v.1).collect();
    let k = cfg.rank.unwrap_or_else(|| energy_rank(&sorted, cfg.energy));
    let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let mut out = DMatrix::zeros(img.nrows(), img.ncols());
    for &(i, sv) in &s[..k] {
        out += u.column(i) * vt.row(i) * sv;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletFilterConfig {
    pub levels: usize,
    /// Fraction of coefficients (by magnitude) retained.
    pub keep: f64,
}

impl Default for WaveletFilterConfig {
    fn default() -> Self {
        Self { levels: 2, keep: 0.1 }
    }
}

fn haar_pairs(v: &mut [f64], tmp: &mut Vec<f64>, inverse: bool) {
    let h = v.len() / 2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    tmp.clear();
    tmp.extend_from_slice(v);
    for i in 0..h {
        if inverse {
            let (a, d) = (tmp[i], tmp[h + i]);
            v[2 * i] = (a + d) * s;
            v[2 * i + 1] = (a - d) * s;
        } else {
            let (x, y) = (tmp[2 * i], tmp[2 * i + 1]);
            v[i] = (x + y) * s;
            v[h + i] = (x - y) * s;
        }
    }
}

fn haar_level(m: &mut DMatrix<f64>, rows: usize, cols: usize, inverse: bool) {
    let mut tmp = Vec::new();
    let mut line = vec![0.0; rows.max(cols)];
    let do_cols = |m: &mut DMatrix<f64>, line: &mut Vec<f64>, tmp: &mut Vec<f64>| {
        for j in 0..cols {
            for i in 0..rows {
                line[i] = m[(i, j)];
            }
            haar_pairs(&mut line[..rows], tmp, inverse);
            for i in 0..rows {
                m[(i, j)] = line[i];
            }
        }
    };
    let do_rows = |m: &mut DMatrix<f64>, line: &mut Vec<f64>, tmp: &mut Vec<f64>| {
        for i in 0..rows {
            for j in 0..cols {
                line[j] = m[(i, j)];
            }
            haar_pairs(&mut line[..cols], tmp, inverse);
            for j in 0..cols {
                m[(i, j)] = line[j];
            }
        }
    };
    if inverse {
        do_rows(m, &mut line, &mut tmp);
        do_cols(m, &mut line, &mut tmp);
    } else {
        do_cols(m, &mut line, &mut tmp);
        do_rows(m, &mut line, &mut tmp);
    }
}

fn check_dyadic(m: &DMatrix<f64>, levels: usize) -> Result<()> {
    let d = 1usize << levels;
    if levels == 0 || !m.nrows().is_multiple_of(d) || !m.ncols().is_multiple_of(d) || m.is_empty() {
        return invalid(format!(
            "{}x{} image is not divisible by 2^{levels}",
            m.nrows(),
            m.ncols()
        ));
    }
    Ok(())
}

/// Multi-level orthonormal 2-D Haar transform; the approximation band ends
/// up in the top-left `rows/2^L × cols/2^L` block.
pub fn haar_forward(img: &DMatrix<f64>, levels: usize) -> Result<DMatrix<f64>> {
    check_dyadic(img, levels)?;
    let mut m = img.clone();
    for l in 0..levels {
        haar_level(&mut m, img.nrows() >> l, img.ncols() >> l, false);
    }
    Ok(m)
}

pub fn haar_inverse(coeffs: &DMatrix<f64>, levels: usize) -> Result<DMatrix<f64>> {
    check_dyadic(coeffs, levels)?;
    let mut m = coeffs.clone();
    for l in (0..levels).rev() {
        haar_level(&mut m, coeffs.nrows() >> l, coeffs.ncols() >> l, true);
    }
    Ok(m)
}

fn reflect(i: usize, n: usize) -> usize {
    // symmetric extension: ... n-2, n-1 | n-1, n-2 ...
    let period = 2 * n;
    let k = i % period;
    if k < n {
        k
    } else {
        period - 1 - k
    }
}

/// Pads by reflection to a multiple of `2^levels`, keeps the largest
/// `⌈keep·N⌉` coefficients, inverts and crops back.
pub fn wavelet_denoise_image(img: &DMatrix<f64>, cfg: &WaveletFilterConfig) -> Result<DMatrix<f64>> {
    if !(cfg.keep > 0.0 && cfg.keep <= 1.0) {
        return invalid(format!("wavelet keep fraction {} outside (0, 1]", cfg.keep));
    }
    if cfg.levels == 0 || cfg.levels > 16 {
        return invalid("wavelet levels must be in 1..=16");
    }
    if img.is_empty() {
        return invalid("empty image");
    }
    let d = 1usize << cfg.levels;
    let (r, c) = img.shape();
    let (pr, pc) = (r.div_ceil(d) * d, c.div_ceil(d) * d);
    let padded = DMatrix::from_fn(pr, pc, |i, j| img[(reflect(i, r), reflect(j, c))]);
    let mut coeffs = haar_forward(&padded, cfg.levels)?;
    let n = coeffs.len();
    let keep = ((cfg.keep * n as f64).ceil() as usize).clamp(1, n);
    let mut mags: Vec<f64> = coeffs.iter().map(|v| v.abs()).collect();
    let (_, &mut cut, _) = mags.select_nth_unstable_by(n - keep, f64::total_cmp);
    let mut kept = 0;
    // ties at the cut are resolved in storage order so exactly `keep` survive
    let above = coeffs.iter().filter(|v| v.abs() > cut).count();
    let mut tie_budget = keep - above;
    for v in coeffs.iter_mut() {
        let a = v.abs();
        if a > cut || (a == cut && tie_budget > 0) {
            if a == cut {
                tie_budget -= 1;
            }
            kept += 1;
        } else {
            *v = 0.0;
        }
    }
    debug_assert_eq!(kept, keep);
    let rec = haar_inverse(&coeffs, cfg.levels)?;
    Ok(rec.view((0, 0), (r, c)).into_owned())
}

fn per_image(stack: &ImageStack, f: impl Fn(&DMatrix<f64>) -> Result<DMatrix<f64>>) -> Result<ImageStack> {
    let mut data = DMatrix::zeros(stack.pixels(), stack.len());
    for j in 0..stack.len() {
        let out = f(&stack.image(j))?;
        for (d, v) in data.column_mut(j).iter_mut().zip(out.iter()) {
            *d = v.clamp(0.0, 1.0);
        }
    }
    stack.with_data(data)
}

/// [`svd_denoise_image`] on every image of the stack, clamped to `[0, 1]`.
pub fn svd_denoise(stack: &ImageStack, cfg: &SvdFilterConfig) -> Result<ImageStack> {
    per_image(stack, |m| svd_denoise_image(m, cfg))
}

/// [`wavelet_denoise_image`] on every image of the stack, clamped to `[0, 1]`.
pub fn wavelet_denoise(stack: &ImageStack, cfg: &WaveletFilterConfig) -> Result<ImageStack> {
    per_image(stack, |m| wavelet_denoise_image(m, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn rand_img(r: usize, c: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = crate::rng::substream(seed, &[]);
        DMatrix::from_fn(r, c, |_, _| rng.random::<f64>())
    }

    #[test]
    fn haar_is_orthonormal_and_invertible() {
        let x = rand_img(16, 8, 1);
        let c = haar_forward(&x, 3).unwrap();
        assert!((c.norm() - x.norm()).abs() < 1e-12);
        assert!((haar_inverse(&c, 3).unwrap() - &x).norm() < 1e-12);
        assert!(haar_forward(&rand_img(6, 8, 1), 2).is_err());
    }

    #[test]
    fn full_keep_and_full_rank_reproduce_input() {
        let x = rand_img(13, 9, 2);
        let w = wavelet_denoise_image(&x, &WaveletFilterConfig { levels: 2, keep: 1.0 }).unwrap();
        assert!((w - &x).norm() < 1e-12);
        let s = svd_denoise_image(&x, &SvdFilterConfig { rank: None, energy: 1.0 }).unwrap();
        assert!((s - &x).norm() < 1e-10);
    }

    #[test]
    fn energy_rank_rule() {
        assert_eq!(energy_rank(&[3.0, 1.0, 1.0], 0.8), 1);
        assert_eq!(energy_rank(&[3.0, 1.0, 1.0], 0.95), 3);
        assert_eq!(energy_rank(&[0.0, 0.0], 0.95), 0);
    }

    #[test]
    fn reflect_indices() {
        let v: Vec<usize> = (0..8).map(|i| reflect(i, 3)).collect();
        assert_eq!(v, vec![0, 1, 2, 2, 1, 0, 0, 1]);
    }
}
