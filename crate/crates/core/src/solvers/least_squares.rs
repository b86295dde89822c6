use nalgebra::{Cholesky, DMatrix, Dyn};

use super::{ensure_finite, gemm, gemm_nt, gemm_tn};
use crate::error::{invalid, Result};

/// Ridge selection for [`LeastSquaresFactor`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Ridge {
    /// `1e-8 * trace(A Aᵀ) / rows(A)`.
    #[default]
    Auto,
    Fixed(f64),
}

impl Ridge {
    pub fn resolve(self, a: &DMatrix<f64>) -> f64 {
        match self {
            Ridge::Auto => default_ridge(a),
            Ridge::Fixed(eps) => eps,
        }
    }
}

/// Default ridge for a design matrix: `1e-8 * trace(A Aᵀ) / rows(A)`.
pub fn default_ridge(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    1e-8 * a.norm_squared() / a.nrows() as f64
}

enum Factor {
    /// Gram `A Aᵀ + εI`, used when `A` is wide or square.
    Rows(Cholesky<f64, Dyn>),
    /// Gram `Aᵀ A + εI`, used when `A` is tall; `W = B (AᵀA + εI)⁻¹ Aᵀ`.
    Cols(Cholesky<f64, Dyn>),
    /// Singular Gram with no ridge: Moore-Penrose pseudo-inverse of `A`.
    Pinv(DMatrix<f64>),
}

/// Factorisation of a fixed design `A` for repeated solves of
/// `min_W ‖B − W A‖²_F + ε‖W‖²_F`.
///
/// The smaller of the two Gram matrices is factored, so a `P×Q` design with
/// `Q ≪ P` costs a `Q×Q` Cholesky. Both orientations give the same `W`
/// (push-through identity).
pub struct LeastSquaresFactor {
    a: DMatrix<f64>,
    ridge: f64,
    factor: Factor,
}

impl LeastSquaresFactor {
    pub fn new(a: &DMatrix<f64>, ridge: Ridge) -> Result<Self> {
        ensure_finite(a, "least-squares design")?;
        let eps = ridge.resolve(a);
        if !(eps >= 0.0) || !eps.is_finite() {
            return crate::error::domain(format!("ridge must be finite and non-negative, got {eps}"));
        }
        let (rows, cols) = a.shape();
        let factor = if rows <= cols {
            let mut g = gemm_nt(a, a);
            add_diag(&mut g, eps);
            Cholesky::new(g).map(Factor::Rows)
        } else {
            let mut g = gemm_tn(a, a);
            add_diag(&mut g, eps);
            Cholesky::new(g).map(Factor::Cols)
        };
        let factor = match factor.filter(|f| eps > 0.0 || well_conditioned(f)) {
            Some(f) => f,
            None => {
                let pinv = a
                    .clone()
                    .pseudo_inverse(1e-12 * a.norm().max(f64::MIN_POSITIVE))
                    .map_err(|e| crate::Error::Domain(e.to_string()))?;
                Factor::Pinv(pinv)
            }
        };
        Ok(Self {
            a: a.clone(),
            ridge: eps,
            factor,
        })
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Solves for `W` given targets `B` (one column per design column).
    pub fn solve(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if b.ncols() != self.a.ncols() {
            return invalid(format!(
                "least squares: target has {} columns, design has {}",
                b.ncols(),
                self.a.ncols()
            ));
        }
        ensure_finite(b, "least-squares target")?;
        Ok(match &self.factor {
            Factor::Rows(chol) => {
                // (A Aᵀ + εI) Wᵀ = A Bᵀ
                let rhs = gemm_nt(&self.a, b);
                chol.solve(&rhs).transpose()
            }
            Factor::Cols(chol) => {
                // Wᵀ = A (AᵀA + εI)⁻¹ Bᵀ
                let inner = chol.solve(&b.transpose());
                gemm_nt(&inner.transpose(), &self.a)
            }
            Factor::Pinv(pinv) => gemm(b, pinv),
        })
    }
}

/// Without a ridge, a Cholesky that only succeeded through rounding
/// (pivot ratio near machine precision) is treated as singular.
fn well_conditioned(f: &Factor) -> bool {
    let l = match f {
        Factor::Rows(c) | Factor::Cols(c) => c.l_dirty(),
        Factor::Pinv(_) => return true,
    };
    let d = l.diagonal();
    let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v.abs()), hi.max(v.abs())));
    lo * lo > 1e-12 * hi * hi
}

fn add_diag(g: &mut DMatrix<f64>, eps: f64) {
    for i in 0..g.nrows() {
        g[(i, i)] += eps;
    }
}

/// `W = B Aᵀ (A Aᵀ + εI)⁻¹`, the minimiser of `‖B − W A‖²_F + ε‖W‖²_F`.
pub fn solve_least_squares(a: &DMatrix<f64>, b: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    if a.ncols() != b.ncols() {
        return invalid(format!(
            "least squares: design has {} columns, target has {}",
            a.ncols(),
            b.ncols()
        ));
    }
    ensure_finite(b, "least-squares target")?;
    LeastSquaresFactor::new(a, Ridge::Fixed(ridge))?.solve(b)
}
