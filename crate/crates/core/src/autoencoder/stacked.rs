use std::time::Instant;

use nalgebra::DMatrix;

use super::{
    check_pair, check_reg, converged, init_weights, l1, AutoencoderWeights, TrainOptions, TrainTrace,
    Trained, Variant,
};
use crate::error::{invalid, Result};
use crate::solvers::{gemm, gemm_tn, ista_solve_gram, IstaOptions, LeastSquaresFactor};

/// Per-term values of the stacked objective.
#[derive(Clone, Copy)]
struct Terms {
    decode: f64,
    /// `μᵢ‖φ⁻¹(Zᵢ) − Wᵢ Zᵢ₋₁‖²`
    couple: [f64; 3],
    /// `λᵢ‖Zᵢ‖₁`
    sparse: [f64; 3],
}

impl Terms {
    fn total(&self) -> f64 {
        self.decode + self.couple.iter().sum::<f64>() + self.sparse.iter().sum::<f64>()
    }
}

/// Trains the three-hidden-layer stacked sparse autoencoder.
///
/// `sizes = (l0, l1, l2)` must strictly decrease. `coupling = [μ0, μ1, μ2]`
/// weight the layer-consistency residuals and `sparsity = [λ0, λ1, λ2]` the
/// l1 penalties on the codes. Each outer iteration fits `W11, W12, W21, W22`
/// by least squares and then updates `Z0, Z1, Z2` by ISTA.
pub fn train_stacked_sdae(
    x: &DMatrix<f64>,
    x_hat: &DMatrix<f64>,
    sizes: (usize, usize, usize),
    coupling: [f64; 3],
    sparsity: [f64; 3],
    opts: &TrainOptions,
) -> Result<Trained> {
    check_pair(x, x_hat)?;
    opts.validate()?;
    let (l0, l1s, l2) = sizes;
    if !(l0 > l1s && l1s > l2 && l2 > 0) {
        return invalid(format!("stacked layer sizes must strictly decrease, got {sizes:?}"));
    }
    for (i, (&m, &l)) in coupling.iter().zip(&sparsity).enumerate() {
        check_reg(&format!("mu{i}"), m)?;
        check_reg(&format!("lambda{i}"), l)?;
    }
    let p = x.nrows();
    let act = opts.activation;
    let start = Instant::now();

    let mut rng = crate::rng::substream(opts.seed, &[0x5DAE, Variant::StackedSdae as u64]);
    let mut w = [
        init_weights(l0, p, &mut rng),
        init_weights(l1s, l0, &mut rng),
        init_weights(l2, l1s, &mut rng),
    ];
    let mut w_out = init_weights(p, l2, &mut rng);
    let mut z = Vec::with_capacity(3);
    for i in 0..3 {
        let input = if i == 0 { x_hat } else { &z[i - 1] };
        z.push(act.apply(&gemm(&w[i], input)));
    }

    let couple_term = |i: usize, wi: &DMatrix<f64>, zi: &DMatrix<f64>, input: &DMatrix<f64>| {
        coupling[i] * (act.invert(zi) - gemm(wi, input)).norm_squared()
    };

    let mut terms = Terms {
        decode: (x - gemm(&w_out, &z[2])).norm_squared(),
        couple: [0.0; 3],
        sparse: [0.0; 3],
    };
    for i in 0..3 {
        let input = if i == 0 { x_hat } else { &z[i - 1] };
        terms.couple[i] = couple_term(i, &w[i], &z[i], input);
        terms.sparse[i] = sparsity[i] * l1(&z[i]);
    }
    let mut trace = TrainTrace {
        initial_objective: terms.total(),
        ..TrainTrace::default()
    };

    let x_norm = x.norm_squared();
    let first_fit = LeastSquaresFactor::new(x_hat, opts.ridge)?;

    for _ in 0..opts.max_outer_iterations {
        let before = terms.total();

        // Weight blocks, encoder side first: W11, W12, W21.
        for i in 0..3 {
            let target = act.invert(&z[i]);
            let cand = if i == 0 {
                first_fit.solve(&target)?
            } else {
                LeastSquaresFactor::new(&z[i - 1], opts.ridge)?.solve(&target)?
            };
            let input = if i == 0 { x_hat } else { &z[i - 1] };
            let c = couple_term(i, &cand, &z[i], input);
            if c <= terms.couple[i] {
                w[i] = cand;
                terms.couple[i] = c;
            }
        }
        // W22
        let cand = LeastSquaresFactor::new(&z[2], opts.ridge)?.solve(x)?;
        let d = (x - gemm(&cand, &z[2])).norm_squared();
        if d <= terms.decode {
            w_out = cand;
            terms.decode = d;
        }

        // Code blocks Z0, Z1, Z2. Each minimises
        //   ‖T − A Zᵢ‖² (weight a) + μᵢ‖Zᵢ − φ(Wᵢ Zᵢ₋₁)‖² + λᵢ‖Zᵢ‖₁
        // where (A, T, a) is the next layer's map and target:
        // (W12, φ⁻¹Z1, μ1), (W21, φ⁻¹Z2, μ2), (W22, X, 1).
        for i in 0..3 {
            let input = if i == 0 { x_hat } else { &z[i - 1] };
            let prior = act.apply(&gemm(&w[i], input));
            let (next_w, next_t, next_weight) = match i {
                0 => (&w[1], act.invert(&z[1]), coupling[1]),
                1 => (&w[2], act.invert(&z[2]), coupling[2]),
                _ => (&w_out, x.clone(), 1.0),
            };
            let cand = code_step(
                next_w,
                &next_t,
                next_weight,
                &prior,
                coupling[i],
                sparsity[i],
                &z[i],
                &opts.ista,
            )?;
            let mut c = terms;
            c.couple[i] = couple_term(i, &w[i], &cand, input);
            c.sparse[i] = sparsity[i] * l1(&cand);
            if i < 2 {
                c.couple[i + 1] = couple_term(i + 1, &w[i + 1], &z[i + 1], &cand);
            } else {
                c.decode = (x - gemm(&w_out, &cand)).norm_squared();
            }
            if c.total() <= terms.total() {
                z[i] = cand;
                terms = c;
            }
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

    let [w11, w12, w21] = w;
    let weights = AutoencoderWeights::new(Variant::StackedSdae, act, vec![w11, w12, w21, w_out])?;
    Ok(Trained {
        weights,
        trace,
        codes: z,
    })
}

/// ISTA on `a‖T − A Z‖² + μ‖Z − E‖² + λ‖Z‖₁`, i.e. the stacked design
/// `[√a A; √μ I]` against `[√a T; √μ E]`.
#[allow(clippy::too_many_arguments)]
fn code_step(
    next_w: &DMatrix<f64>,
    next_target: &DMatrix<f64>,
    next_weight: f64,
    prior: &DMatrix<f64>,
    mu: f64,
    lambda: f64,
    z0: &DMatrix<f64>,
    ista: &IstaOptions,
) -> Result<DMatrix<f64>> {
    let mut gram = gemm_tn(next_w, next_w) * next_weight;
    for i in 0..gram.nrows() {
        gram[(i, i)] += mu;
    }
    let dty = gemm_tn(next_w, next_target) * next_weight + prior * mu;
    let y_sq: Vec<f64> = next_target
        .column_iter()
        .zip(prior.column_iter())
        .map(|(t, e)| next_weight * t.norm_squared() + mu * e.norm_squared())
        .collect();
    Ok(ista_solve_gram(&gram, &dty, &y_sq, lambda, z0, ista)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::{infer, objective_value, Regularizers};
    use crate::solvers::StepSize;
    use rand::Rng;

    fn low_rank(p: usize, q: usize, rank: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = crate::rng::substream(seed, &[]);
        let u = DMatrix::from_fn(p, rank, |_, _| rng.random::<f64>());
        let v = DMatrix::from_fn(rank, q, |_, _| rng.random::<f64>());
        let m = u * v;
        let max = m.max();
        m / max
    }

    fn tight(iters: usize) -> TrainOptions {
        TrainOptions {
            max_outer_iterations: iters,
            outer_tolerance: 0.0,
            ista: IstaOptions {
                max_iterations: 2000,
                relative_tolerance: 1e-12,
                step: StepSize::Auto,
            },
            ..TrainOptions::default()
        }
    }

    #[test]
    fn represents_low_rank_data_without_sparsity() {
        let x = low_rank(30, 60, 8, 1);
        let t = train_stacked_sdae(&x, &x, (20, 14, 8), [1.0; 3], [0.0; 3], &tight(100)).unwrap();
        let rec = infer(&t.weights, &x).unwrap();
        let err = (rec - &x).norm_squared();
        assert!(err <= 1e-4 * x.norm_squared(), "{err} vs {}", x.norm_squared());
    }

    #[test]
    fn single_pair_is_interpolated() {
        let x = low_rank(12, 1, 1, 2);
        let x_hat = low_rank(12, 1, 1, 3);
        let t = train_stacked_sdae(&x, &x_hat, (6, 4, 2), [1.0; 3], [0.0; 3], &tight(300)).unwrap();
        let rec = infer(&t.weights, &x_hat).unwrap();
        assert!((rec - &x).amax() < 1e-6, "{}", (infer(&t.weights, &x_hat).unwrap() - &x).amax());
    }

    #[test]
    fn trace_monotone_and_consistent() {
        let x = low_rank(20, 50, 5, 4);
        let x_hat = x.map(|v| (0.7 * v + 0.2).min(1.0));
        let coupling = [1.0, 0.5, 2.0];
        let sparsity = [0.1, 0.05, 0.2];
        let t = train_stacked_sdae(&x, &x_hat, (12, 8, 5), coupling, sparsity, &TrainOptions::default()).unwrap();
        let mut prev = t.trace.initial_objective;
        for &o in &t.trace.objectives {
            assert!(o <= prev * (1.0 + 1e-8), "{prev} -> {o}");
            prev = o;
        }
        let regs = Regularizers::Stacked { coupling, sparsity };
        let direct = objective_value(&t.weights, &t.codes, &x, &x_hat, &regs).unwrap();
        assert!((direct - t.trace.final_objective()).abs() <= 1e-10 * direct);
    }

    #[test]
    fn decoupled_layers_still_descend() {
        let x = low_rank(14, 30, 4, 5);
        let x_hat = low_rank(14, 30, 4, 6);
        let t = train_stacked_sdae(&x, &x_hat, (8, 6, 4), [0.0; 3], [0.0; 3], &TrainOptions::default()).unwrap();
        let mut prev = t.trace.initial_objective;
        for &o in &t.trace.objectives {
            assert!(o <= prev);
            prev = o;
        }
    }

    #[test]
    fn rejects_non_decreasing_sizes() {
        let x = low_rank(10, 5, 2, 7);
        let o = TrainOptions::default();
        assert!(matches!(
            train_stacked_sdae(&x, &x, (4, 4, 2), [1.0; 3], [0.1; 3], &o),
            Err(crate::Error::InvalidConfig(_))
        ));
        assert!(train_stacked_sdae(&x, &x, (4, 5, 2), [1.0; 3], [0.1; 3], &o).is_err());
    }
}
