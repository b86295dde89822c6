//! Denoising autoencoders trained by alternating block minimisation.
//!
//! Three variants share one weight container:
//!
//! - DAE: `min ‖X − W2 Z‖² + λ‖Z − φ(W1 X̂)‖²`, with the code update in
//!   closed form.
//! - SparseDAE: the same objective plus `μ‖Z‖₁`; the code update is an ISTA
//!   solve on the stacked design `[W2; √λ I]`.
//! - StackedSDAE: three hidden layers `l0 > l1 > l2` with per-layer coupling
//!   weights `μ0..μ2` and sparsity weights `λ0..λ2`.
//!
//! Weight blocks are closed-form least-squares fits. Every block update is
//! accepted only if it does not increase the training objective, so the
//! recorded trace is non-increasing.

mod activation;
mod objective;
mod shallow;
mod stacked;
mod weights;

pub use activation::{Activation, ActivationKind};
pub use objective::{objective_value, Regularizers};
pub use shallow::{train_dae, train_sparse_dae};
pub use stacked::train_stacked_sdae;
pub use weights::{infer, read_weights, write_weights, AutoencoderWeights, Variant};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::solvers::{IstaOptions, Ridge};

/// Outer-loop and inner-solver settings shared by all variants.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub activation: Activation,
    pub max_outer_iterations: usize,
    /// Stop once the relative decrease of the objective falls below this.
    pub outer_tolerance: f64,
    pub seed: u64,
    pub ista: IstaOptions,
    pub ridge: Ridge,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            activation: Activation::default(),
            max_outer_iterations: 50,
            outer_tolerance: 1e-4,
            seed: 0,
            ista: IstaOptions::default(),
            ridge: Ridge::Auto,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<()> {
        self.activation.validate()?;
        self.ista.validate()?;
        if self.max_outer_iterations == 0 {
            return invalid("max_outer_iterations must be at least 1");
        }
        if !(self.outer_tolerance >= 0.0) {
            return invalid("outer_tolerance must be non-negative");
        }
        Ok(())
    }
}

/// Objective value and cumulative wall time after each outer iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub initial_objective: f64,
    pub objectives: Vec<f64>,
    pub wall_times: Vec<f64>,
}

impl TrainTrace {
    pub fn iterations(&self) -> usize {
        self.objectives.len()
    }

    pub fn final_objective(&self) -> f64 {
        self.objectives.last().copied().unwrap_or(self.initial_objective)
    }
}

/// Output of a training run: weights, trace, and the final hidden codes
/// (`[Z]` for shallow variants, `[Z0, Z1, Z2]` for the stacked one).
#[derive(Debug, Clone)]
pub struct Trained {
    pub weights: AutoencoderWeights,
    pub trace: TrainTrace,
    pub codes: Vec<DMatrix<f64>>,
}

fn check_pair(x: &DMatrix<f64>, x_hat: &DMatrix<f64>) -> Result<()> {
    if x.shape() != x_hat.shape() {
        return invalid(format!(
            "clean stack is {:?} but corrupt stack is {:?}",
            x.shape(),
            x_hat.shape()
        ));
    }
    if x.ncols() == 0 || x.nrows() == 0 {
        return invalid("training stacks are empty");
    }
    crate::solvers::ensure_finite(x, "clean stack")?;
    crate::solvers::ensure_finite(x_hat, "corrupt stack")
}

fn check_reg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        crate::error::domain(format!("{name} must be finite and non-negative, got {v}"))
    }
}

/// Gaussian entries with standard deviation `1/√fan_in`.
fn init_weights(rows: usize, fan_in: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let scale = 1.0 / (fan_in.max(1) as f64).sqrt();
    DMatrix::from_fn(rows, fan_in, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

fn l1(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

/// Relative-change stopping rule shared by the outer loops.
fn converged(prev: f64, cur: f64, tol: f64, scale: f64) -> bool {
    (prev - cur).abs() <= tol * prev.abs() || cur <= 1e-14 * scale
}
