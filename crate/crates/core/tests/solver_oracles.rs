use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rdae_core::solvers::{
    ista_solve, lipschitz_bound, soft_threshold, solve_least_squares, IstaOptions, StepSize,
};

fn randn(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Normal equations `W (A Aᵀ + εI) = B Aᵀ` solved by LU on the explicit Gram.
fn normal_equation_oracle(a: &DMatrix<f64>, b: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let mut g = a * a.transpose();
    for i in 0..g.nrows() {
        g[(i, i)] += eps;
    }
    let rhs = (b * a.transpose()).transpose();
    g.lu().solve(&rhs).unwrap().transpose()
}

/// Cyclic coordinate descent for `min ‖y − Dz‖² + μ‖z‖₁`.
fn lasso_cd(d: &DMatrix<f64>, y: &[f64], mu: f64) -> Vec<f64> {
    let n = d.ncols();
    let mut z = vec![0.0; n];
    let mut r: Vec<f64> = y.to_vec();
    let norms: Vec<f64> = (0..n).map(|k| d.column(k).norm_squared()).collect();
    for _ in 0..100_000 {
        let mut delta = 0.0f64;
        for k in 0..n {
            let col = d.column(k);
            let rho: f64 = col.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() + norms[k] * z[k];
            let t = mu / 2.0;
            let new = if rho > t {
                (rho - t) / norms[k]
            } else if rho < -t {
                (rho + t) / norms[k]
            } else {
                0.0
            };
            let step = new - z[k];
            if step != 0.0 {
                for (ri, a) in r.iter_mut().zip(col.iter()) {
                    *ri -= a * step;
                }
                z[k] = new;
                delta = delta.max(step.abs());
            }
        }
        if delta < 1e-14 {
            break;
        }
    }
    z
}

fn lasso_objective(d: &DMatrix<f64>, y: &[f64], z: &[f64], mu: f64) -> f64 {
    let dz = d * DMatrix::from_column_slice(z.len(), 1, z);
    let fit: f64 = y.iter().zip(dz.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    fit + mu * z.iter().map(|v| v.abs()).sum::<f64>()
}

#[test]
fn least_squares_matches_normal_equations_on_50_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..50 {
        let rows = rng.random_range(2..12);
        let cols = rng.random_range(rows..40);
        let a = randn(&mut rng, rows, cols);
        let out = rng.random_range(1..6);
        let b = randn(&mut rng, out, cols);
        let eps = if i % 2 == 0 { 0.0 } else { rng.random_range(1e-3..10.0) };
        let w = solve_least_squares(&a, &b, eps).unwrap();
        let oracle = normal_equation_oracle(&a, &b, eps);
        let rel = (&w - &oracle).norm() / oracle.norm();
        assert!(rel < 1e-8, "instance {i}: relative error {rel}");
    }
}

#[test]
fn tall_design_uses_the_smaller_gram_and_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = randn(&mut rng, 60, 8);
    let b = randn(&mut rng, 3, 8);
    let w = solve_least_squares(&a, &b, 0.5).unwrap();
    let oracle = normal_equation_oracle(&a, &b, 0.5);
    assert!((&w - &oracle).norm() <= 1e-8 * oracle.norm());
}

#[test]
fn ista_matches_coordinate_descent_on_50_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let opts = IstaOptions {
        max_iterations: 50_000,
        relative_tolerance: 1e-15,
        step: StepSize::Auto,
    };
    for i in 0..50 {
        let m = rng.random_range(5..25);
        let n = rng.random_range(2..15);
        let d = randn(&mut rng, m, n);
        let y = randn(&mut rng, m, 1);
        let mu = rng.random_range(0.05..3.0);
        let (z, _) = ista_solve(&d, &y, mu, &DMatrix::zeros(n, 1), &opts).unwrap();
        let ours = lasso_objective(&d, y.as_slice(), z.as_slice(), mu);
        let oracle = lasso_objective(&d, y.as_slice(), &lasso_cd(&d, y.as_slice(), mu), mu);
        assert!(
            (ours - oracle).abs() <= 1e-5 * oracle.max(1e-12),
            "instance {i}: ista {ours} vs cd {oracle}"
        );
    }
}

#[test]
fn explicit_step_is_honoured() {
    let d = DMatrix::<f64>::identity(3, 3);
    let y = DMatrix::from_column_slice(3, 1, &[2.0, -0.1, 0.5]);
    let opts = IstaOptions {
        max_iterations: 1,
        relative_tolerance: 1e-12,
        step: StepSize::Explicit(1.0),
    };
    let (z, rep) = ista_solve(&d, &y, 0.4, &DMatrix::zeros(3, 1), &opts).unwrap();
    assert_eq!(rep.lipschitz, 1.0);
    assert_eq!(z.as_slice(), &[1.8, 0.0, 0.3]);
}

#[test]
fn lipschitz_bound_dominates_spectral_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let a = randn(&mut rng, 12, 7);
        let s = a.clone().singular_values().max();
        let l = lipschitz_bound(&a);
        assert!(l >= s * s && l <= 1.02 * s * s, "{l} vs {}", s * s);
    }
}

proptest! {
    #[test]
    fn soft_threshold_is_odd_and_shrinks(v in prop::collection::vec(-10.0f64..10.0, 1..20), t in 0.0f64..5.0) {
        let pos = soft_threshold(&v, t).unwrap();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let negs = soft_threshold(&neg, t).unwrap();
        for ((a, b), x) in pos.iter().zip(&negs).zip(&v) {
            prop_assert_eq!(*a, -*b);
            prop_assert!(a.abs() <= x.abs());
            prop_assert!((x.abs() - a.abs() - t.min(x.abs())).abs() < 1e-12);
        }
    }

    #[test]
    fn ista_never_increases_the_objective(seed in 0u64..500, mu in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = randn(&mut rng, 8, 5);
        let y = randn(&mut rng, 8, 3);
        let opts = IstaOptions { max_iterations: 50, relative_tolerance: 1e-14, step: StepSize::Auto };
        let (_, rep) = ista_solve(&d, &y, mu, &DMatrix::zeros(5, 3), &opts).unwrap();
        for w in rep.objective_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }
}
