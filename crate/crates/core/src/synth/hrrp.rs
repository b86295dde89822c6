use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::SPEED_OF_LIGHT;

/// Range resolution `c/(2β)` and unambiguous range `c/(2Δf)`.
pub fn range_axes(bandwidth: f64, frequency_step: f64) -> (f64, f64) {
    (
        SPEED_OF_LIGHT / (2.0 * bandwidth),
        SPEED_OF_LIGHT / (2.0 * frequency_step),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct HrrpConfig {
    /// Range cells spanning `[0, R_u)`.
    pub range_bins: usize,
}

impl Default for HrrpConfig {
    fn default() -> Self {
        Self { range_bins: 64 }
    }
}

/// Power range profile (range × time). Row `i` covers
/// `[i, i + 1)·R_u/range_bins` and is evaluated at its centre.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub power: DMatrix<f64>,
    pub resolution: f64,
    pub unambiguous_range: f64,
}

impl RangeProfile {
    /// Row containing range `r`, after folding by the unambiguous range.
    pub fn range_row(&self, r: f64) -> usize {
        let n = self.power.nrows();
        let folded = r.rem_euclid(self.unambiguous_range);
        ((folded / self.unambiguous_range * n as f64).floor() as usize).min(n - 1)
    }
}

/// Hann-windowed inverse Fourier transform across frequency for each listed
/// time row of `s_rx` (time × frequency, sampled on `freqs`).
pub fn hrrp(s_rx: &DMatrix<Complex64>, freqs: &[f64], times: &[usize], cfg: &HrrpConfig) -> Result<RangeProfile> {
    let n = freqs.len();
    if n < 2 {
        return invalid("range profiles need at least two frequencies");
    }
    if s_rx.ncols() != n {
        return invalid(format!("{} frequency columns for {n} frequencies", s_rx.ncols()));
    }
    if cfg.range_bins == 0 {
        return invalid("range_bins must be positive");
    }
    if let Some(&t) = times.iter().find(|&&t| t >= s_rx.nrows()) {
        return invalid(format!("time index {t} beyond {} samples", s_rx.nrows()));
    }
    let step = (freqs[n - 1] - freqs[0]) / (n - 1) as f64;
    if !(step > 0.0) || freqs.windows(2).any(|p| ((p[1] - p[0]) - step).abs() > 1e-9 * step) {
        return invalid("frequency grid must be uniform and increasing");
    }
    let (resolution, unambiguous_range) = range_axes(n as f64 * step, step);
    let window: Vec<f64> = (0..n)
        .map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos())
        .collect();
    let norm = window.iter().sum::<f64>().powi(2);
    let bins = cfg.range_bins;
    // steering[(i, k)] = w_k exp(+j4π f_k r_i / c)
    let steering = DMatrix::from_fn(bins, n, |i, k| {
        let r = (i as f64 + 0.5) * unambiguous_range / bins as f64;
        Complex64::from_polar(window[k], 4.0 * std::f64::consts::PI * freqs[k] * r / SPEED_OF_LIGHT)
    });
    let mut power = DMatrix::zeros(bins, times.len());
    for (j, &t) in times.iter().enumerate() {
        for i in 0..bins {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += steering[(i, k)] * s_rx[(t, k)];
            }
            power[(i, j)] = acc.norm_sqr() / norm;
        }
    }
    Ok(RangeProfile {
        power,
        resolution,
        unambiguous_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(r: f64, freqs: &[f64], samples: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(samples, freqs.len(), |_, k| {
            Complex64::from_polar(1.0, -4.0 * std::f64::consts::PI * freqs[k] * r / SPEED_OF_LIGHT)
        })
    }

    fn grid() -> Vec<f64> {
        (0..133).map(|k| 1.4e9 + k as f64 * 2e9 / 133.0).collect()
    }

    #[test]
    fn point_target_lands_in_its_bin() {
        let f = grid();
        let s = point(3.0, &f, 4);
        let p = hrrp(&s, &f, &[0, 1, 2, 3], &HrrpConfig::default()).unwrap();
        let want = p.range_row(3.0);
        for j in 0..4 {
            assert_eq!(p.power.column(j).imax(), want);
        }
        assert!((p.resolution - 0.075).abs() < 1e-3 * 0.075);
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let mut f = grid();
        f[10] += 1e6;
        let s = point(3.0, &f, 1);
        assert!(hrrp(&s, &f, &[0], &HrrpConfig::default()).is_err());
    }
}
