use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Result};

/// Short-time Fourier transform layout. Frame `k` is centred at
/// `(k + 0.5)·hop` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct StftConfig {
    pub sample_rate: f64,
    /// Hann window length in seconds.
    pub window: f64,
    /// Doppler bins; must be at least the window length in samples.
    pub n_fft: usize,
    /// Frame spacing in seconds.
    pub hop: f64,
}

impl StftConfig {
    pub fn window_samples(&self) -> usize {
        (self.window * self.sample_rate).round() as usize
    }

    fn validate(&self, len: usize) -> Result<()> {
        if !(self.sample_rate > 0.0 && self.hop > 0.0 && self.window > 0.0) {
            return invalid("sample rate, hop and window must be positive");
        }
        let w = self.window_samples();
        if w == 0 {
            return invalid("window shorter than one sample");
        }
        if w > len {
            return invalid(format!("window of {w} samples exceeds signal of {len}"));
        }
        if self.n_fft < w {
            return invalid(format!("n_fft {} below window length {w}", self.n_fft));
        }
        Ok(())
    }
}

/// Power STFT. Row `r` is Doppler `(r − n_fft/2)·sample_rate/n_fft`; a unit
/// complex tone on a bin centre has power 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub power: DMatrix<f64>,
    pub sample_rate: f64,
    pub hop: f64,
}

impl Spectrogram {
    pub fn doppler(&self, row: usize) -> f64 {
        let n = self.power.nrows();
        (row as f64 - (n / 2) as f64) * self.sample_rate / n as f64
    }

    /// Row whose Doppler is nearest `f`, folded into `[−fs/2, fs/2)`.
    pub fn doppler_row(&self, f: f64) -> usize {
        let n = self.power.nrows() as f64;
        let bin = (f * n / self.sample_rate).round() as i64;
        (bin + (n as i64) / 2).rem_euclid(n as i64) as usize
    }

    /// `count` frames starting at `first`.
    pub fn crop(&self, first: usize, count: usize) -> Result<DMatrix<f64>> {
        if first + count > self.power.ncols() {
            return invalid(format!(
                "frames {first}..{} beyond the {} available",
                first + count,
                self.power.ncols()
            ));
        }
        Ok(self.power.columns(first, count).into_owned())
    }
}

fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Squared-magnitude STFT of a narrowband slow-time signal.
pub fn spectrogram(signal: &[Complex64], cfg: &StftConfig) -> Result<Spectrogram> {
    cfg.validate(signal.len())?;
    let w = hann(cfg.window_samples());
    let norm = w.iter().sum::<f64>().powi(2);
    let duration = signal.len() as f64 / cfg.sample_rate;
    let frames = (duration / cfg.hop + 1e-9).floor() as usize;
    let n = cfg.n_fft;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut power = DMatrix::zeros(n, frames);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let half = w.len() as f64 / 2.0;
    for k in 0..frames {
        let centre = (k as f64 + 0.5) * cfg.hop * cfg.sample_rate;
        let start = (centre - half).round() as i64;
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (i, &wi) in w.iter().enumerate() {
            let t = start + i as i64;
            if t >= 0 && (t as usize) < signal.len() {
                buf[i] = signal[t as usize] * wi;
            }
        }
        fft.process(&mut buf);
        for (m, v) in buf.iter().enumerate() {
            power[((m + n / 2) % n, k)] = v.norm_sqr() / norm;
        }
    }
    Ok(Spectrogram {
        power,
        sample_rate: cfg.sample_rate,
        hop: cfg.hop,
    })
}
