//! Denoising autoencoders for radar signatures corrupted by wall clutter and
//! noise, together with the synthetic data generator used to train them.
//!
//! The crate is organised bottom-up:
//!
//! - [`solvers`]: ridge least squares, power iteration and ISTA, the kernels
//!   every autoencoder is assembled from.
//! - [`autoencoder`]: the shallow DAE, its sparse variant and the three-layer
//!   stacked sparse autoencoder, trained by alternating block minimisation.
//! - [`synth`]: point-scatterer gait model, multipath wall channel, Doppler
//!   spectrograms, range profiles, frontal phantoms and corruption models.
//! - [`metrics`]: SSIM and NMSE.
//! - [`baselines`]: truncated-SVD and Haar wavelet denoisers.
//!
//! All matrices are `nalgebra::DMatrix<f64>`; an image stack holds one
//! vectorised image per column.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autoencoder;
pub mod baselines;
mod error;
pub mod metrics;
pub mod rng;
pub mod solvers;
pub mod synth;

pub use error::{Error, Result};
pub use nalgebra::DMatrix;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
