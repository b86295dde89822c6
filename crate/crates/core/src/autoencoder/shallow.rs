use std::time::Instant;

use nalgebra::{Cholesky, DMatrix};

use super::{
    check_pair, check_reg, converged, init_weights, l1, AutoencoderWeights, TrainOptions, TrainTrace,
    Trained, Variant,
};
use crate::error::{invalid, Result};
use crate::solvers::{gemm, gemm_tn, ista_solve_gram, LeastSquaresFactor};

/// Trains the single-hidden-layer DAE.
///
/// Each outer iteration fits `W1` to `φ⁻¹(Z)` from `X̂`, fits `W2` to `X`
/// from `Z`, then updates `Z` by the ridge system
/// `(W2ᵀW2 + λI) Z = W2ᵀX + λ φ(W1 X̂)`.
pub fn train_dae(
    x: &DMatrix<f64>,
    x_hat: &DMatrix<f64>,
    hidden: usize,
    lambda: f64,
    opts: &TrainOptions,
) -> Result<Trained> {
    train_shallow(x, x_hat, hidden, lambda, None, opts)
}

/// Trains the SparseDAE; the code update minimises
/// `‖[X; √λ φ(W1 X̂)] − [W2; √λ I] Z‖² + μ‖Z‖₁` by ISTA, warm-started
/// from the current codes.
pub fn train_sparse_dae(
    x: &DMatrix<f64>,
    x_hat: &DMatrix<f64>,
    hidden: usize,
    lambda: f64,
    mu: f64,
    opts: &TrainOptions,
) -> Result<Trained> {
    check_reg("mu", mu)?;
    train_shallow(x, x_hat, hidden, lambda, Some(mu), opts)
}

struct Terms {
    decode: f64,
    couple: f64,
    sparse: f64,
}

impl Terms {
    fn total(&self) -> f64 {
        self.decode + self.couple + self.sparse
    }
}

fn train_shallow(
    x: &DMatrix<f64>,
    x_hat: &DMatrix<f64>,
    hidden: usize,
    lambda: f64,
    mu: Option<f64>,
    opts: &TrainOptions,
) -> Result<Trained> {
    check_pair(x, x_hat)?;
    opts.validate()?;
    check_reg("lambda", lambda)?;
    let p = x.nrows();
    if hidden == 0 || hidden >= p {
        return invalid(format!("hidden size must be in 1..{p}, got {hidden}"));
    }
    let variant = if mu.is_some() { Variant::SparseDae } else { Variant::Dae };
    let act = opts.activation;
    let mu_w = mu.unwrap_or(0.0);
    let start = Instant::now();

    let mut rng = crate::rng::substream(opts.seed, &[0xDAE]);
    let mut w1 = init_weights(hidden, p, &mut rng);
    let mut w2 = init_weights(p, hidden, &mut rng);
    let mut enc = act.apply(&gemm(&w1, x_hat));
    let mut z = enc.clone();

    let x_norm = x.norm_squared();
    let encoder_fit = LeastSquaresFactor::new(x_hat, opts.ridge)?;
    let mut terms = Terms {
        decode: (x - gemm(&w2, &z)).norm_squared(),
        couple: 0.0,
        sparse: mu_w * l1(&z),
    };
    let mut trace = TrainTrace {
        initial_objective: terms.total(),
        ..TrainTrace::default()
    };

    for _ in 0..opts.max_outer_iterations {
        let before = terms.total();

        // W1: min ‖φ⁻¹(Z) − W1 X̂‖²
        let cand_w1 = encoder_fit.solve(&act.invert(&z))?;
        let cand_enc = act.apply(&gemm(&cand_w1, x_hat));
        let couple = lambda * (&z - &cand_enc).norm_squared();
        if couple <= terms.couple {
            w1 = cand_w1;
            enc = cand_enc;
            terms.couple = couple;
        }

        // W2: min ‖X − W2 Z‖²
        let cand_w2 = LeastSquaresFactor::new(&z, opts.ridge)?.solve(x)?;
        let decode = (x - gemm(&cand_w2, &z)).norm_squared();
        if decode <= terms.decode {
            w2 = cand_w2;
            terms.decode = decode;
        }

        // Z: code update against the current weights.
        let cand_z = match mu {
            None => dae_code(x, &w2, &enc, lambda, opts)?,
            Some(mu) => {
                let mut gram = gemm_tn(&w2, &w2);
                for i in 0..hidden {
                    gram[(i, i)] += lambda;
                }
                let dty = gemm_tn(&w2, x) + &enc * lambda;
                let y_sq: Vec<f64> = x
                    .column_iter()
                    .zip(enc.column_iter())
                    .map(|(xc, ec)| xc.norm_squared() + lambda * ec.norm_squared())
                    .collect();
                ista_solve_gram(&gram, &dty, &y_sq, mu, &z, &opts.ista)?.0
            }
        };
        let cand = Terms {
            decode: (x - gemm(&w2, &cand_z)).norm_squared(),
            couple: lambda * (&cand_z - &enc).norm_squared(),
            sparse: mu_w * l1(&cand_z),
        };
        if cand.total() <= terms.total() {
            z = cand_z;
            terms = cand;
        }

        let now = terms.total();
        if !now.is_finite() {
            return crate::error::domain("training objective became non-finite");
        }
        trace.objectives.push(now);
        trace.wall_times.push(start.elapsed().as_secs_f64());
        if converged(before, now, opts.outer_tolerance, x_norm) {
            break;
        }
    }

    let weights = AutoencoderWeights::new(variant, act, vec![w1, w2])?;
    Ok(Trained {
        weights,
        trace,
        codes: vec![z],
    })
}

/// Closed-form DAE code: `(W2ᵀW2 + λI)⁻¹ (W2ᵀX + λE)`; for `λ = 0` the
/// least-squares code of `X` under `W2`.
fn dae_code(
    x: &DMatrix<f64>,
    w2: &DMatrix<f64>,
    enc: &DMatrix<f64>,
    lambda: f64,
    opts: &TrainOptions,
) -> Result<DMatrix<f64>> {
    if lambda == 0.0 {
        // Zᵀ = argmin ‖Xᵀ − Zᵀ W2ᵀ‖²
        let w2t = w2.transpose();
        return Ok(LeastSquaresFactor::new(&w2t, opts.ridge)?
            .solve(&x.transpose())?
            .transpose());
    }
    let mut gram = gemm_tn(w2, w2);
    for i in 0..gram.nrows() {
        gram[(i, i)] += lambda;
    }
    let rhs = gemm_tn(w2, x) + enc * lambda;
    let chol = Cholesky::new(gram)
        .ok_or_else(|| crate::Error::Domain("DAE code system is not positive definite".into()))?;
    Ok(chol.solve(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::{infer, objective_value, Regularizers};
    use crate::solvers::{IstaOptions, StepSize};
    use rand::Rng;

    fn low_rank(p: usize, q: usize, rank: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = crate::rng::substream(seed, &[]);
        let u = DMatrix::from_fn(p, rank, |_, _| rng.random::<f64>());
        let v = DMatrix::from_fn(rank, q, |_, _| rng.random::<f64>());
        let m = u * v;
        let max = m.max();
        m / max
    }

    #[test]
    fn autoencodes_clean_low_rank_data() {
        let x = low_rank(12, 30, 11, 1);
        let t = train_dae(&x, &x, 11, 1.0, &TrainOptions::default()).unwrap();
        assert!(
            t.trace.final_objective() <= 1e-3 * x.norm_squared(),
            "{} vs {}",
            t.trace.final_objective(),
            x.norm_squared()
        );
    }

    #[test]
    fn single_pair_is_interpolated() {
        let x = low_rank(10, 1, 1, 2);
        let x_hat = low_rank(10, 1, 1, 3);
        let opts = TrainOptions {
            max_outer_iterations: 200,
            outer_tolerance: 0.0,
            ..TrainOptions::default()
        };
        let t = train_dae(&x, &x_hat, 4, 1.0, &opts).unwrap();
        let rec = infer(&t.weights, &x_hat).unwrap();
        assert!((rec - &x).amax() < 1e-6);
    }

    #[test]
    fn zero_lambda_code_is_plain_least_squares() {
        let x = low_rank(9, 20, 5, 4);
        let x_hat = low_rank(9, 20, 6, 5);
        let opts = TrainOptions {
            max_outer_iterations: 1,
            ..TrainOptions::default()
        };
        let t = train_dae(&x, &x_hat, 5, 0.0, &opts).unwrap();
        let w2 = &t.weights.layers()[1];
        let z = &t.codes[0];
        // normal equations of min ‖X − W2 Z‖
        let resid = w2.transpose() * (&x - w2 * z);
        assert!(resid.norm() < 1e-6 * (w2.transpose() * &x).norm());
    }

    #[test]
    fn trace_is_monotone_and_matches_objective() {
        let x = low_rank(15, 40, 4, 6);
        let x_hat = x.map(|v| (v + 0.1).min(1.0));
        let t = train_sparse_dae(&x, &x_hat, 6, 1.0, 0.05, &TrainOptions::default()).unwrap();
        let mut prev = t.trace.initial_objective;
        for &o in &t.trace.objectives {
            assert!(o <= prev * (1.0 + 1e-8), "{prev} -> {o}");
            prev = o;
        }
        let regs = Regularizers::SparseDae { lambda: 1.0, mu: 0.05 };
        let direct = objective_value(&t.weights, &t.codes, &x, &x_hat, &regs).unwrap();
        assert!((direct - t.trace.final_objective()).abs() <= 1e-10 * direct.max(1.0));
    }

    #[test]
    fn sparse_with_zero_mu_reduces_to_dae() {
        let x = low_rank(10, 25, 4, 7);
        let x_hat = low_rank(10, 25, 9, 8);
        let opts = TrainOptions {
            max_outer_iterations: 10,
            outer_tolerance: 0.0,
            ista: IstaOptions {
                max_iterations: 5000,
                relative_tolerance: 0.0,
                step: StepSize::Auto,
            },
            ..TrainOptions::default()
        };
        let dae = train_dae(&x, &x_hat, 6, 1.0, &opts).unwrap();
        let sparse = train_sparse_dae(&x, &x_hat, 6, 1.0, 0.0, &opts).unwrap();
        let a = dae.trace.final_objective();
        let b = sparse.trace.final_objective();
        assert!((a - b).abs() <= 1e-5 * a, "{a} vs {b}");
    }

    #[test]
    fn huge_mu_zeroes_codes() {
        let x = low_rank(8, 12, 3, 9);
        let x_hat = low_rank(8, 12, 3, 10);
        let opts = TrainOptions {
            max_outer_iterations: 3,
            ..TrainOptions::default()
        };
        let t = train_sparse_dae(&x, &x_hat, 4, 1.0, 1e9, &opts).unwrap();
        assert!(t.codes[0].iter().all(|&v| v == 0.0));
        let enc = &t.weights.layers()[0] * &x_hat;
        let expected = x.norm_squared() + enc.norm_squared();
        assert!((t.trace.final_objective() - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn sparsity_grows_with_mu() {
        let x = low_rank(16, 40, 6, 11);
        let x_hat = x.map(|v| (0.8 * v + 0.05).min(1.0));
        let mut prev = usize::MAX;
        for mu in [0.01, 0.1, 1.0] {
            let t = train_sparse_dae(&x, &x_hat, 8, 1.0, mu, &TrainOptions::default()).unwrap();
            let nonzero = t.codes[0].iter().filter(|v| v.abs() >= 1e-8).count();
            assert!(nonzero <= prev, "mu={mu}: {nonzero} > {prev}");
            prev = nonzero;
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let x = low_rank(10, 20, 3, 12);
        let x_hat = low_rank(10, 20, 3, 13);
        let o = TrainOptions::default();
        let a = train_sparse_dae(&x, &x_hat, 5, 1.0, 0.1, &o).unwrap();
        let b = train_sparse_dae(&x, &x_hat, 5, 1.0, 0.1, &o).unwrap();
        assert_eq!(a.weights, b.weights);
    }

    #[test]
    fn config_errors() {
        let x = low_rank(6, 5, 2, 14);
        let o = TrainOptions::default();
        assert!(train_dae(&x, &x, 6, 1.0, &o).is_err());
        assert!(train_dae(&x, &low_rank(6, 4, 2, 1), 3, 1.0, &o).is_err());
        assert!(matches!(
            train_sparse_dae(&x, &x, 3, 1.0, -0.1, &o),
            Err(crate::Error::Domain(_))
        ));
    }
}
