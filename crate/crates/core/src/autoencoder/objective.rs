use nalgebra::DMatrix;

use super::{l1, AutoencoderWeights, Variant};
use crate::error::{invalid, Result};
use crate::solvers::gemm;

/// Regularisation weights of each variant's training objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizers {
    /// `‖X − W2 Z‖² + λ‖Z − φ(W1 X̂)‖²`
    Dae { lambda: f64 },
    /// DAE objective plus `μ‖Z‖₁`.
    SparseDae { lambda: f64, mu: f64 },
    /// `‖X − W22 Z2‖² + Σᵢ μᵢ‖φ⁻¹(Zᵢ) − Wᵢ Zᵢ₋₁‖² + Σᵢ λᵢ‖Zᵢ‖₁`, with
    /// `coupling = [μ0, μ1, μ2]` and `sparsity = [λ0, λ1, λ2]`.
    Stacked { coupling: [f64; 3], sparsity: [f64; 3] },
}

impl Regularizers {
    pub fn variant(&self) -> Variant {
        match self {
            Regularizers::Dae { .. } => Variant::Dae,
            Regularizers::SparseDae { .. } => Variant::SparseDae,
            Regularizers::Stacked { .. } => Variant::StackedSdae,
        }
    }
}

/// Evaluates a variant's training objective for given weights and codes.
pub fn objective_value(
    weights: &AutoencoderWeights,
    codes: &[DMatrix<f64>],
    x: &DMatrix<f64>,
    x_hat: &DMatrix<f64>,
    regs: &Regularizers,
) -> Result<f64> {
    if regs.variant() != weights.variant() {
        return invalid(format!(
            "regularizers for {} given with {} weights",
            regs.variant().name(),
            weights.variant().name()
        ));
    }
    if x.shape() != x_hat.shape() || x.nrows() != weights.pixels() {
        return invalid("stack shapes do not match the weights");
    }
    let layers = weights.layers();
    let q = x.ncols();
    let hidden = &layers[..layers.len() - 1];
    if codes.len() != hidden.len() {
        return invalid(format!("expected {} code matrices, got {}", hidden.len(), codes.len()));
    }
    for (z, w) in codes.iter().zip(hidden) {
        if z.nrows() != w.nrows() || z.ncols() != q {
            return invalid("code matrix shape does not match its layer");
        }
    }
    let act = weights.activation();
    match *regs {
        Regularizers::Dae { lambda } | Regularizers::SparseDae { lambda, .. } => {
            let z = &codes[0];
            let decode = (x - gemm(&layers[1], z)).norm_squared();
            let enc = act.apply(&gemm(&layers[0], x_hat));
            let couple = lambda * (z - enc).norm_squared();
            let sparse = match *regs {
                Regularizers::SparseDae { mu, .. } => mu * l1(z),
                _ => 0.0,
            };
            Ok(decode + couple + sparse)
        }
        Regularizers::Stacked { coupling, sparsity } => {
            let decode = (x - gemm(&layers[3], &codes[2])).norm_squared();
            let mut total = decode;
            for i in 0..3 {
                let input = if i == 0 { x_hat } else { &codes[i - 1] };
                let r = act.invert(&codes[i]) - gemm(&layers[i], input);
                total += coupling[i] * r.norm_squared() + sparsity[i] * l1(&codes[i]);
            }
            Ok(total)
        }
    }
}
