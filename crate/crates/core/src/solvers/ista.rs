use nalgebra::DMatrix;

use super::threshold::shrink;
use super::{ensure_finite, gemm, gemm_tn, lipschitz_bound_gram};
use crate::error::{domain, invalid, Result};

/// How the ISTA step `1/L` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `L` from power iteration on `DᵀD`.
    Auto,
    /// Use this value as `1/L` directly.
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IstaOptions {
    pub max_iterations: usize,
    /// Per-column stopping threshold on the relative objective change; zero
    /// runs exactly `max_iterations` updates.
    pub relative_tolerance: f64,
    pub step: StepSize,
}

impl Default for IstaOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            relative_tolerance: 1e-4,
            step: StepSize::Auto,
        }
    }
}

impl IstaOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return invalid("ISTA max_iterations must be at least 1");
        }
        if !(self.relative_tolerance >= 0.0) {
            return invalid("ISTA relative_tolerance must be non-negative");
        }
        if let StepSize::Explicit(s) = self.step {
            if !(s > 0.0) || !s.is_finite() {
                return invalid(format!("ISTA explicit step must be positive, got {s}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IstaReport {
    /// Largest number of proximal-gradient updates applied to any column.
    pub iterations: usize,
    /// The `L` used for the step (`1/step` when explicit).
    pub lipschitz: f64,
    /// Total objective (summed over columns) at each evaluated iterate,
    /// starting with `Z0`.
    pub objective_history: Vec<f64>,
}

/// Minimises `‖Y − D Z‖²_F + μ‖Z‖₁` by iterative soft thresholding:
/// `Z ← S(Z + (1/L) Dᵀ(Y − D Z), μ/(2L))`.
///
/// Columns are independent problems; each stops on its own relative
/// objective change, so results do not depend on how columns are grouped.
pub fn ista_solve(
    d: &DMatrix<f64>,
    y: &DMatrix<f64>,
    mu: f64,
    z0: &DMatrix<f64>,
    opts: &IstaOptions,
) -> Result<(DMatrix<f64>, IstaReport)> {
    if d.nrows() != y.nrows() {
        return invalid(format!(
            "ISTA: design has {} rows, target has {}",
            d.nrows(),
            y.nrows()
        ));
    }
    ensure_finite(d, "ISTA design")?;
    ensure_finite(y, "ISTA target")?;
    let gram = gemm_tn(d, d);
    let dty = gemm_tn(d, y);
    let y_sq: Vec<f64> = y.column_iter().map(|c| c.norm_squared()).collect();
    ista_solve_gram(&gram, &dty, &y_sq, mu, z0, opts)
}

/// ISTA from sufficient statistics: `gram = DᵀD`, `dty = DᵀY` and the
/// per-column squared target norms `‖y_j‖²`.
///
/// Each iteration costs one `n×n` by `n×Q` product, independent of the
/// number of rows of `D`.
pub fn ista_solve_gram(
    gram: &DMatrix<f64>,
    dty: &DMatrix<f64>,
    y_sq: &[f64],
    mu: f64,
    z0: &DMatrix<f64>,
    opts: &IstaOptions,
) -> Result<(DMatrix<f64>, IstaReport)> {
    opts.validate()?;
    let n = gram.nrows();
    let q = dty.ncols();
    if gram.ncols() != n || dty.nrows() != n {
        return invalid("ISTA: Gram and DᵀY shapes disagree");
    }
    if z0.nrows() != n || z0.ncols() != q {
        return invalid(format!(
            "ISTA: initial code is {}x{}, expected {n}x{q}",
            z0.nrows(),
            z0.ncols()
        ));
    }
    if y_sq.len() != q {
        return invalid("ISTA: target norm count disagrees with column count");
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return domain(format!("ISTA: l1 weight must be finite and non-negative, got {mu}"));
    }
    ensure_finite(gram, "ISTA Gram")?;
    ensure_finite(dty, "ISTA DᵀY")?;
    ensure_finite(z0, "ISTA initial code")?;

    let (step, lipschitz) = match opts.step {
        StepSize::Auto => {
            let l = lipschitz_bound_gram(gram);
            (1.0 / l, l)
        }
        StepSize::Explicit(s) => (s, 1.0 / s),
    };
    let theta = 0.5 * mu * step;

    let mut z = z0.clone();
    let mut col_obj = vec![0.0; q];
    let mut active: Vec<usize> = (0..q).collect();
    let mut history = Vec::new();
    let mut updates = 0;

    for iter in 0..=opts.max_iterations {
        if active.is_empty() {
            break;
        }
        let za = gather(&z, &active);
        let gz = gemm(gram, &za);
        let mut still_active = Vec::with_capacity(active.len());
        for (k, &j) in active.iter().enumerate() {
            let zc = za.column(k);
            let gzc = gz.column(k);
            let bc = dty.column(j);
            let f = y_sq[j] - 2.0 * zc.dot(&bc) + zc.dot(&gzc) + mu * zc.lp_norm(1);
            let converged =
                iter > 0 && (col_obj[j] - f).abs() < opts.relative_tolerance * col_obj[j].abs();
            col_obj[j] = f;
            if !converged {
                still_active.push((k, j));
            }
        }
        history.push(col_obj.iter().sum());
        if iter == opts.max_iterations || still_active.is_empty() {
            break;
        }
        for &(k, j) in &still_active {
            let zc = za.column(k);
            let gzc = gz.column(k);
            let bc = dty.column(j);
            let mut out = z.column_mut(j);
            for i in 0..n {
                out[i] = shrink(zc[i] + step * (bc[i] - gzc[i]), theta);
            }
        }
        updates += 1;
        active = still_active.into_iter().map(|(_, j)| j).collect();
    }

    Ok((
        z,
        IstaReport {
            iterations: updates,
            lipschitz,
            objective_history: history,
        },
    ))
}

fn gather(z: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    if cols.len() == z.ncols() {
        return z.clone();
    }
    DMatrix::from_fn(z.nrows(), cols.len(), |i, k| z[(i, cols[k])])
}
