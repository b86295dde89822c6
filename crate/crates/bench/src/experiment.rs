//! One grid point of a sweep: synthesise, split, corrupt the labels, train
//! every configured algorithm and score it on the held-out images.

use std::time::Instant;

use nalgebra::DMatrix;
use rdae_core::autoencoder::{infer, train_dae, train_sparse_dae, train_stacked_sdae, AutoencoderWeights, Trained};
use rdae_core::baselines::{svd_denoise, wavelet_denoise, SvdFilterConfig, WaveletFilterConfig};
use rdae_core::metrics::{nmse, ssim};
use rdae_core::rng::derive_seed;
use rdae_core::synth::{generate_pair, shuffle_labels, ImageStack, PairedDataset};
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, DataPoint, ExperimentConfig, Kind, Wall};
use crate::error::Result;

/// One CSV line of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub kind: Kind,
    pub carrier_ghz: f64,
    pub wall: Wall,
    pub snr_db: f64,
    pub scr_db: f64,
    pub mismatch_pct: f64,
    pub ssim_bd: f64,
    pub ssim_ad: f64,
    pub nmse_bd: f64,
    pub nmse_ad: f64,
    pub train_s: f64,
    pub test_ms: f64,
    pub seed: u64,
}

impl ResultRow {
    /// Training diverged; the after-denoising fields are NaN.
    pub fn diverged(&self) -> bool {
        self.ssim_ad.is_nan() || self.nmse_ad.is_nan()
    }
}

/// Mean SSIM and mean per-image NMSE of `output` columns against `clean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub ssim: f64,
    pub nmse: f64,
}

pub fn score(output: &DMatrix<f64>, clean: &ImageStack) -> Result<Scores> {
    let (r, c) = clean.image_shape();
    let q = clean.len();
    let (mut s, mut e) = (0.0, 0.0);
    for j in 0..q {
        let out = DMatrix::from_column_slice(r, c, output.column(j).as_slice());
        let reference = clean.image(j);
        s += ssim(&out, &reference)?;
        e += nmse(&out, &reference)?;
    }
    Ok(Scores {
        ssim: s / q as f64,
        nmse: e / q as f64,
    })
}

/// A fitted denoiser.
#[derive(Debug, Clone)]
pub enum Model {
    Learned(AutoencoderWeights),
    Svd(SvdFilterConfig),
    Wavelet(WaveletFilterConfig),
}

impl Model {
    pub fn denoise(&self, corrupt: &ImageStack) -> Result<DMatrix<f64>> {
        Ok(match self {
            Model::Learned(w) => infer(w, corrupt.data())?,
            Model::Svd(c) => svd_denoise(corrupt, c)?.into_data(),
            Model::Wavelet(c) => wavelet_denoise(corrupt, c)?.into_data(),
        })
    }

    /// Mean milliseconds per denoising pass over `corrupt`.
    pub fn time_ms(&self, corrupt: &ImageStack, passes: usize) -> Result<f64> {
        let start = Instant::now();
        for _ in 0..passes {
            std::hint::black_box(self.denoise(std::hint::black_box(corrupt))?);
        }
        Ok(start.elapsed().as_secs_f64() * 1e3 / passes as f64)
    }
}

/// Trains one learned variant with the configured sizes and regularisers.
pub fn train(
    cfg: &ExperimentConfig,
    alg: Algorithm,
    x: &DMatrix<f64>,
    x_hat: &DMatrix<f64>,
    seed: u64,
) -> Result<Trained> {
    let t = &cfg.training;
    let opts = cfg.train_options(seed);
    let [l0, l1, l2] = t.stacked_sizes;
    Ok(match alg {
        Algorithm::Dae => train_dae(x, x_hat, t.hidden, t.lambda, &opts)?,
        Algorithm::SparseDae => train_sparse_dae(x, x_hat, t.hidden, t.lambda, t.mu, &opts)?,
        Algorithm::StackedSdae => train_stacked_sdae(x, x_hat, (l0, l1, l2), t.coupling, t.sparsity, &opts)?,
        Algorithm::Svd | Algorithm::Wavelet => unreachable!("baselines are not trained"),
    })
}

/// Seeds of one grid point, all derived from the master and replicate seed.
pub fn split_seed(cfg: &ExperimentConfig, seed: u64) -> u64 {
    derive_seed(cfg.experiment.master_seed, &[seed, 0x5917])
}

pub fn mismatch_seed(cfg: &ExperimentConfig, seed: u64, mismatch_pct: f64) -> u64 {
    derive_seed(cfg.experiment.master_seed, &[seed, 0x5AFF, mismatch_pct.to_bits()])
}

pub fn train_seed(cfg: &ExperimentConfig, seed: u64, alg: Algorithm) -> u64 {
    derive_seed(cfg.experiment.master_seed, &[seed, 0x7A1, alg as u64])
}

pub fn dataset(cfg: &ExperimentConfig, point: &DataPoint) -> Result<PairedDataset> {
    let mut pair = generate_pair(&cfg.dataset_spec(point))?;
    pair.config_hash = cfg.hash();
    Ok(pair)
}

/// Train/test split of a generated pair, with the training labels shuffled
/// for `mismatch_pct`.
pub struct Prepared {
    pub train_clean: ImageStack,
    pub train_corrupt: ImageStack,
    pub test: PairedDataset,
}

pub fn prepare(cfg: &ExperimentConfig, pair: &PairedDataset, seed: u64, mismatch_pct: f64) -> Result<Prepared> {
    let (train, test) = pair.split(cfg.experiment.split, split_seed(cfg, seed))?;
    let (train_clean, _) = shuffle_labels(&train.clean, mismatch_pct / 100.0, mismatch_seed(cfg, seed, mismatch_pct))?;
    Ok(Prepared {
        train_clean,
        train_corrupt: train.corrupt,
        test,
    })
}

/// All result rows of one data point, across the mismatch grid and the
/// configured algorithms, in configuration order.
pub fn run_point(cfg: &ExperimentConfig, point: &DataPoint) -> Result<Vec<ResultRow>> {
    let pair = dataset(cfg, point)?;
    let passes = cfg.experiment.timing_passes;
    let mut rows = Vec::new();
    for &mismatch_pct in &cfg.experiment.mismatch_pct {
        let p = prepare(cfg, &pair, point.seed, mismatch_pct)?;
        let bd = score(p.test.corrupt.data(), &p.test.clean)?;
        for &alg in &cfg.training.algorithms {
            let start = Instant::now();
            let model = match alg {
                Algorithm::Svd => Ok(Model::Svd(cfg.svd())),
                Algorithm::Wavelet => Ok(Model::Wavelet(cfg.wavelet())),
                _ => match train(cfg, alg, p.train_clean.data(), p.train_corrupt.data(), train_seed(cfg, point.seed, alg)) {
                    Ok(t) => Ok(Model::Learned(t.weights)),
                    Err(crate::BenchError::Core(rdae_core::Error::Domain(msg))) => Err(msg),
                    Err(e) => return Err(e),
                },
            };
            let train_s = if alg.is_learned() { start.elapsed().as_secs_f64() } else { 0.0 };
            if let Err(msg) = &model {
                eprintln!("warning: {} diverged at {} mismatch {mismatch_pct}%: {msg}", alg.name(), point.stem());
            }
            let (ad, test_ms) = match &model {
                Ok(m) => (score(&m.denoise(&p.test.corrupt)?, &p.test.clean)?, m.time_ms(&p.test.corrupt, passes)?),
                Err(_) => (
                    Scores {
                        ssim: f64::NAN,
                        nmse: f64::NAN,
                    },
                    f64::NAN,
                ),
            };
            rows.push(ResultRow {
                algorithm: alg,
                kind: point.kind,
                carrier_ghz: point.carrier_ghz,
                wall: point.wall,
                snr_db: point.snr_db,
                scr_db: point.scr_db,
                mismatch_pct,
                ssim_bd: bd.ssim,
                ssim_ad: ad.ssim,
                nmse_bd: bd.nmse,
                nmse_ad: ad.nmse,
                train_s,
                test_ms,
                seed: point.seed,
            });
        }
    }
    Ok(rows)
}
