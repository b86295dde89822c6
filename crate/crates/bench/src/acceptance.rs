//! The acceptance suite. Each criterion returns an [`Outcome`] rather than
//! panicking so the CLI can report all of them before choosing an exit code.
//! Reference values come from oracles implemented here independently of the
//! library's solvers.

use std::fmt;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rdae_core::autoencoder::{
    infer, objective_value, train_dae, train_sparse_dae, train_stacked_sdae, Activation, AutoencoderWeights,
    Regularizers, TrainOptions, TrainTrace, Variant,
};
use rdae_core::metrics::{nmse, ssim};
use rdae_core::solvers::{ista_solve, solve_least_squares, IstaOptions, StepSize};
use rdae_core::synth::{
    gait_trajectory, generate_pair, hrrp, radar_returns, range_axes, spectrogram, ChannelModel, DatasetSpec,
    GaitParams, HrrpConfig, RadarConfig, RadarPosition, ScattererTrack, StftConfig,
};
use rdae_core::SPEED_OF_LIGHT;

use crate::config::{Algorithm, ExperimentConfig, Kind};
use crate::error::Result;
use crate::experiment::{prepare, score, train, train_seed, Model};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} [{}] {}: {}", self.id, self.title, self.detail)
    }
}

fn outcome(id: u8, title: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome {
        id,
        title,
        passed,
        detail,
    }
}

fn randn(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// `W (A Aᵀ + εI) = B Aᵀ` by LU on the explicit Gram matrix.
fn normal_equations(a: &DMatrix<f64>, b: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let mut g = a * a.transpose();
    for i in 0..g.nrows() {
        g[(i, i)] += eps;
    }
    let rhs = (b * a.transpose()).transpose();
    g.lu().solve(&rhs).expect("oracle Gram is invertible").transpose()
}

/// Cyclic coordinate descent for `min ‖y − Dz‖² + μ‖z‖₁`.
fn lasso_cd(d: &DMatrix<f64>, y: &[f64], mu: f64) -> Vec<f64> {
    let n = d.ncols();
    let mut z = vec![0.0; n];
    let mut r = y.to_vec();
    let norms: Vec<f64> = (0..n).map(|k| d.column(k).norm_squared()).collect();
    for _ in 0..200_000 {
        let mut delta = 0.0f64;
        for k in 0..n {
            let col = d.column(k);
            let rho = col.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() + norms[k] * z[k];
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
        if delta < 1e-15 {
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

pub fn solver_oracles() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_ls = 0.0f64;
    for i in 0..50 {
        let rows = rng.random_range(2..15);
        let cols = rng.random_range(rows + 1..60);
        let out = rng.random_range(1..8);
        let a = randn(&mut rng, rows, cols);
        let b = randn(&mut rng, out, cols);
        let eps = if i % 2 == 0 { 0.0 } else { rng.random_range(1e-3..10.0) };
        let w = solve_least_squares(&a, &b, eps)?;
        let oracle = normal_equations(&a, &b, eps);
        worst_ls = worst_ls.max((&w - &oracle).norm() / oracle.norm());
    }
    let opts = IstaOptions {
        max_iterations: 100_000,
        relative_tolerance: 1e-15,
        step: StepSize::Auto,
    };
    let mut worst_lasso = 0.0f64;
    for _ in 0..50 {
        let m = rng.random_range(5..30);
        let n = rng.random_range(2..20);
        let d = randn(&mut rng, m, n);
        let y = randn(&mut rng, m, 1);
        let mu = rng.random_range(0.05..3.0);
        let (z, _) = ista_solve(&d, &y, mu, &DMatrix::zeros(n, 1), &opts)?;
        let ours = lasso_objective(&d, y.as_slice(), z.as_slice(), mu);
        let oracle = lasso_objective(&d, y.as_slice(), &lasso_cd(&d, y.as_slice(), mu), mu);
        worst_lasso = worst_lasso.max((ours - oracle).abs() / oracle);
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = worst_ls <= 1e-8 && worst_lasso <= 1e-5 && secs <= 10.0;
    Ok(outcome(
        1,
        "solver oracles",
        passed,
        format!("least squares worst rel {worst_ls:.2e} (<= 1e-8), ISTA vs coordinate descent worst rel objective {worst_lasso:.2e} (<= 1e-5), {secs:.2}s (<= 10s)"),
    ))
}

/// Frontal phantoms with mild noise: 31×31 pixels, 200 images.
fn training_set(snr_db: f64, subjects: usize, orientations: usize, size: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let mut spec = DatasetSpec::frontal();
    spec.phantom.rows = size;
    spec.phantom.cols = size;
    spec.phantom.subjects = subjects;
    spec.phantom.orientations = orientations;
    spec.snr_db = snr_db;
    spec.seed = seed;
    let pair = generate_pair(&spec)?;
    Ok((pair.clean.into_data(), pair.corrupt.into_data()))
}

fn worst_increase(trace: &TrainTrace) -> f64 {
    let mut prev = trace.initial_objective;
    let mut worst = f64::NEG_INFINITY;
    for &o in &trace.objectives {
        worst = worst.max((o - prev) / prev.abs());
        prev = o;
    }
    worst
}

pub fn monotone_training() -> Result<Outcome> {
    let start = Instant::now();
    let (x, x_hat) = training_set(0.0, 5, 40, 31, 7)?;
    let opts = TrainOptions {
        seed: 7,
        ..TrainOptions::default()
    };
    let traces = [
        ("DAE", train_dae(&x, &x_hat, 500, 1.0, &opts)?.trace),
        ("SparseDAE", train_sparse_dae(&x, &x_hat, 500, 1.0, 0.1, &opts)?.trace),
        (
            "StackedSDAE",
            train_stacked_sdae(&x, &x_hat, (256, 128, 64), [1.0; 3], [0.1; 3], &opts)?.trace,
        ),
    ];
    let secs = start.elapsed().as_secs_f64();
    let mut passed = secs <= 120.0;
    let mut parts = Vec::new();
    for (name, t) in &traces {
        let w = worst_increase(t);
        passed &= w <= 1e-8;
        parts.push(format!("{name} {} iters, largest rel step {w:+.1e}", t.iterations()));
    }
    Ok(outcome(
        2,
        "monotone training",
        passed,
        format!("{}x{} data; {}; {secs:.1}s (<= 120s)", x.nrows(), x.ncols(), parts.join("; ")),
    ))
}

fn naive_mul(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut s = 0.0;
            for k in 0..a.ncols() {
                s += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// `W22 φ(W21 φ(W12 φ(W11 x̂)))`, clamped, written out layer by layer.
fn explicit_composition(w: &AutoencoderWeights, x_hat: &DMatrix<f64>) -> DMatrix<f64> {
    let l = w.layers();
    let act = w.activation();
    let phi = |m: DMatrix<f64>| m.map(|v| act.forward(v));
    let z0 = phi(naive_mul(&l[0], x_hat));
    let z1 = phi(naive_mul(&l[1], &z0));
    let z2 = phi(naive_mul(&l[2], &z1));
    naive_mul(&l[3], &z2).map(|v| v.clamp(0.0, 1.0))
}

pub fn reduction_identities() -> Result<Outcome> {
    let (x, x_hat) = training_set(10.0, 5, 12, 12, 3)?;
    let opts = TrainOptions {
        max_outer_iterations: 8,
        outer_tolerance: 0.0,
        // a fixed schedule: exactly 2000 ISTA updates per code step
        ista: IstaOptions {
            max_iterations: 2000,
            relative_tolerance: 0.0,
            step: StepSize::Auto,
        },
        seed: 3,
        ..TrainOptions::default()
    };
    let dae = train_dae(&x, &x_hat, 20, 1.0, &opts)?;
    let sparse = train_sparse_dae(&x, &x_hat, 20, 1.0, 0.0, &opts)?;
    let same_len = dae.trace.iterations() == sparse.trace.iterations();
    let mut worst = 0.0f64;
    for (a, b) in std::iter::once((&dae.trace.initial_objective, &sparse.trace.initial_objective))
        .chain(dae.trace.objectives.iter().zip(&sparse.trace.objectives))
    {
        worst = worst.max((a - b).abs() / a.abs());
    }
    // the sparse weights scored under the DAE objective
    let regs = Regularizers::Dae { lambda: 1.0 };
    let as_dae = AutoencoderWeights::new(Variant::Dae, sparse.weights.activation(), sparse.weights.layers().to_vec())?;
    let cross = objective_value(&as_dae, &sparse.codes, &x, &x_hat, &regs)?;
    worst = worst.max((cross - dae.trace.final_objective()).abs() / dae.trace.final_objective());

    let mut worst_comp = 0.0f64;
    for act in [Activation::linear(), Activation::tanh(), Activation::sigmoid()] {
        let o = TrainOptions {
            activation: act,
            max_outer_iterations: 3,
            ..TrainOptions::default()
        };
        let t = train_stacked_sdae(&x, &x_hat, (60, 30, 15), [1.0; 3], [0.1; 3], &o)?;
        let diff = (infer(&t.weights, &x_hat)? - explicit_composition(&t.weights, &x_hat)).amax();
        worst_comp = worst_comp.max(diff);
    }
    let passed = same_len && worst <= 1e-5 && worst_comp <= 1e-12;
    Ok(outcome(
        3,
        "reduction identities",
        passed,
        format!(
            "SparseDAE(mu=0) vs DAE over {} fixed iterations: worst rel objective gap {worst:.2e} (<= 1e-5); stacked inference vs explicit composition max abs diff {worst_comp:.1e} (<= 1e-12)",
            dae.trace.iterations()
        ),
    ))
}

/// The reference spectrogram experiment: 2.4 GHz, low-conductivity wall,
/// SNR −10 dB, no mismatch, Q = 320, 70/30 split.
pub fn reference_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.dataset.kinds = vec![Kind::Spectrogram];
    cfg.dataset.carriers_ghz = vec![2.4];
    cfg.dataset.walls = vec![crate::config::Wall::Low];
    cfg.dataset.snr_db = vec![-10.0];
    cfg.experiment.split = 0.7;
    cfg.experiment.mismatch_pct = vec![0.0];
    cfg.experiment.seeds = vec![0];
    cfg
}

pub fn denoising_effectiveness() -> Result<Outcome> {
    let start = Instant::now();
    let cfg = reference_config();
    let point = cfg.data_points()[0];
    let pair = crate::experiment::dataset(&cfg, &point)?;
    let p = prepare(&cfg, &pair, point.seed, 0.0)?;
    let bd = score(p.test.corrupt.data(), &p.test.clean)?.ssim;
    let mut passed = true;
    let mut parts = vec![format!("Q={} SSIM_BD {bd:.4}", pair.len())];
    let mut stacked = 0.0;
    for alg in [Algorithm::Dae, Algorithm::SparseDae, Algorithm::StackedSdae] {
        let t = train(&cfg, alg, p.train_clean.data(), p.train_corrupt.data(), train_seed(&cfg, point.seed, alg))?;
        let ad = score(&infer(&t.weights, p.test.corrupt.data())?, &p.test.clean)?.ssim;
        passed &= ad >= bd + 0.2;
        if alg == Algorithm::StackedSdae {
            stacked = ad;
        }
        parts.push(format!("{} AD {ad:.4}", alg.name()));
    }
    let secs = start.elapsed().as_secs_f64();
    passed &= stacked >= 0.70 && secs <= 600.0;
    let target = if stacked >= 0.75 { "meets 0.75" } else { "below 0.75, above floor 0.70" };
    Ok(outcome(
        4,
        "denoising effectiveness",
        passed,
        format!("{}; every AD >= BD+0.2; StackedSDAE {target}; {secs:.0}s (<= 600s)", parts.join(", ")),
    ))
}

/// Config for one signature kind of the robustness experiment.
pub fn robustness_config(kind: Kind) -> ExperimentConfig {
    let mut cfg = reference_config();
    cfg.dataset.kinds = vec![kind];
    if kind == Kind::Frontal {
        // frontal images carry discrete clutter and use an 80/20 split
        cfg.dataset.scr_db = vec![0.0];
        cfg.dataset.pfa = 0.06;
        cfg.experiment.split = 0.8;
    }
    cfg.experiment.mismatch_pct = vec![0.0, 50.0];
    cfg.experiment.seeds = vec![0, 1, 2];
    cfg
}

/// Mean SSIM_AD per (variant, mismatch) over seeds for one kind.
pub fn robustness_scores(kind: Kind) -> Result<[[f64; 2]; 3]> {
    let cfg = robustness_config(kind);
    let algs = [Algorithm::Dae, Algorithm::SparseDae, Algorithm::StackedSdae];
    let mut sums = [[0.0; 2]; 3];
    let seeds = cfg.experiment.seeds.clone();
    for point in cfg.data_points() {
        let pair = crate::experiment::dataset(&cfg, &point)?;
        for (m, &mm) in cfg.experiment.mismatch_pct.iter().enumerate() {
            let p = prepare(&cfg, &pair, point.seed, mm)?;
            for (a, &alg) in algs.iter().enumerate() {
                let t = train(&cfg, alg, p.train_clean.data(), p.train_corrupt.data(), train_seed(&cfg, point.seed, alg))?;
                sums[a][m] += score(&infer(&t.weights, p.test.corrupt.data())?, &p.test.clean)?.ssim;
            }
        }
    }
    Ok(sums.map(|r| r.map(|v| v / seeds.len() as f64)))
}

/// Judges the ordering from per-kind scores `[variant][mismatch]`.
pub fn judge_robustness(scores: &[(Kind, [[f64; 2]; 3])]) -> (bool, String) {
    let mut ordered = 0;
    let mut drops = [0.0; 3];
    let mut parts = Vec::new();
    for (kind, s) in scores {
        let [d, sp, st] = [s[0][1], s[1][1], s[2][1]];
        let ok = st >= sp && sp >= d;
        ordered += ok as usize;
        for v in 0..3 {
            drops[v] += (s[v][0] - s[v][1]) / scores.len() as f64;
        }
        parts.push(format!(
            "{}: 50% DAE {d:.4} Sparse {sp:.4} Stacked {st:.4} {}",
            kind.name(),
            if ok { "ordered" } else { "not ordered" }
        ));
    }
    let smallest = drops[2] <= drops[0] && drops[2] <= drops[1];
    let passed = ordered >= 2 && smallest;
    let detail = format!(
        "{}; ordered on {ordered}/{} kinds (need 2); mean drop 0->50%: DAE {:.4} Sparse {:.4} Stacked {:.4} (Stacked smallest: {smallest})",
        parts.join("; "),
        scores.len(),
        drops[0],
        drops[1],
        drops[2]
    );
    (passed, detail)
}

pub fn robustness_ordering() -> Result<Outcome> {
    let start = Instant::now();
    let mut scores = Vec::new();
    for kind in [Kind::Spectrogram, Kind::Hrrp, Kind::Frontal] {
        scores.push((kind, robustness_scores(kind)?));
    }
    let (passed, detail) = judge_robustness(&scores);
    Ok(outcome(
        5,
        "robustness ordering",
        passed,
        format!("{detail}; 3 seeds; {:.0}s", start.elapsed().as_secs_f64()),
    ))
}

pub fn baseline_gap() -> Result<Outcome> {
    let cfg = reference_config();
    let point = cfg.data_points()[0];
    let pair = crate::experiment::dataset(&cfg, &point)?;
    let p = prepare(&cfg, &pair, point.seed, 0.0)?;
    let bd = score(p.test.corrupt.data(), &p.test.clean)?;
    let alg = Algorithm::StackedSdae;
    let t = train(&cfg, alg, p.train_clean.data(), p.train_corrupt.data(), train_seed(&cfg, point.seed, alg))?;
    let st = score(&Model::Learned(t.weights).denoise(&p.test.corrupt)?, &p.test.clean)?;
    let svd = score(&Model::Svd(cfg.svd()).denoise(&p.test.corrupt)?, &p.test.clean)?;
    let wav = score(&Model::Wavelet(cfg.wavelet()).denoise(&p.test.corrupt)?, &p.test.clean)?;
    let passed = st.ssim >= svd.ssim + 0.3 && st.ssim >= wav.ssim + 0.3 && st.nmse < 0.1 * bd.nmse;
    Ok(outcome(
        6,
        "baseline gap",
        passed,
        format!(
            "SSIM_AD StackedSDAE {:.4} vs SVD {:.4} / wavelet {:.4} (gap >= 0.3); NMSE BD {:.4} -> StackedSDAE AD {:.4} (< 0.1 x BD)",
            st.ssim, svd.ssim, wav.ssim, bd.nmse, st.nmse
        ),
    ))
}

pub fn test_time_ordering() -> Result<Outcome> {
    let (x, x_hat) = training_set(0.0, 5, 40, 31, 11)?;
    let (test_clean, test) = training_set(0.0, 5, 20, 31, 12)?;
    drop(test_clean);
    let opts = TrainOptions {
        seed: 11,
        ..TrainOptions::default()
    };
    let dae = train_dae(&x, &x_hat, 500, 1.0, &opts)?.weights;
    let stacked = train_stacked_sdae(&x, &x_hat, (256, 128, 64), [1.0; 3], [0.1; 3], &opts)?.weights;
    let passes = 100;
    let time = |w: &AutoencoderWeights| -> Result<f64> {
        let start = Instant::now();
        for _ in 0..passes {
            std::hint::black_box(infer(w, std::hint::black_box(&test))?);
        }
        Ok(start.elapsed().as_secs_f64() * 1e3 / passes as f64)
    };
    // interleave to share any drift in machine load
    let (mut td, mut ts) = (0.0, 0.0);
    for _ in 0..3 {
        td += time(&dae)? / 3.0;
        ts += time(&stacked)? / 3.0;
    }
    Ok(outcome(
        7,
        "test-time ordering",
        ts < td,
        format!(
            "P={} over {} images, {passes} passes x 3: StackedSDAE {ts:.3} ms < DAE {td:.3} ms",
            x.nrows(),
            test.ncols()
        ),
    ))
}

pub fn metric_identities() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut exact = true;
    for (r, c) in [(31, 31), (64, 64), (12, 9), (5, 5)] {
        let x = DMatrix::from_fn(r, c, |_, _| rng.random::<f64>());
        exact &= ssim(&x, &x)? == 1.0;
        exact &= nmse(&x, &x)? == 0.0;
        exact &= nmse(&(&x * 2.0), &x)? == 1.0;
    }
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = DMatrix::from_fn(31, 31, |_, _| rng.random::<f64>());
        let b = DMatrix::from_fn(31, 31, |_, _| rng.random::<f64>());
        worst = worst.max((ssim(&a, &b)? - ssim(&b, &a)?).abs());
    }
    Ok(outcome(
        8,
        "metric identities",
        exact && worst <= 1e-12,
        format!("exact identities hold: {exact}; SSIM asymmetry over 20 pairs {worst:.1e} (<= 1e-12)"),
    ))
}

pub fn synthesis_physics() -> Result<Outcome> {
    let fc = 2.4e9;
    let v = 1.5;
    // torso walking straight at the radar at antenna height
    let gait = GaitParams {
        speed: v,
        start: [0.5, 8.0],
        heading: -std::f64::consts::FRAC_PI_2,
        arm_swing: 0.0,
        leg_swing: 0.0,
        torso_height: 0.0,
        ..GaitParams::default()
    };
    let track = gait_trajectory(&gait, &RadarPosition::default(), 4.0, 500.0)?.subset(&[0])?;
    let radar = RadarConfig {
        duration: 4.0,
        ..RadarConfig::narrowband(fc)
    };
    let s = radar_returns(&track, &ChannelModel::free_space(), &radar, 1)?;
    let signal: Vec<Complex64> = s.column(0).iter().copied().collect();
    let stft = StftConfig {
        sample_rate: 500.0,
        window: 0.1,
        n_fft: 64,
        hop: 0.01,
    };
    let spec = spectrogram(&signal, &stft)?;
    let f_d = 2.0 * v * fc / SPEED_OF_LIGHT;
    let row = spec.doppler_row(f_d);
    let total: f64 = spec.power.iter().sum();
    let near: f64 = (row.saturating_sub(1)..=(row + 1).min(spec.power.nrows() - 1))
        .map(|r| spec.power.row(r).sum())
        .sum();
    let fraction = near / total;

    let wide = RadarConfig {
        duration: 0.02,
        window: 0.02,
        ..RadarConfig::wideband(fc)
    };
    let freqs = wide.frequencies();
    let r0 = 3.0;
    let point = ScattererTrack::new(500.0, vec![1.0], vec![vec![r0; 10]], vec![vec![r0; 10]])?;
    let sw = radar_returns(&point, &ChannelModel::free_space(), &wide, 1)?;
    let times: Vec<usize> = (0..10).collect();
    let bins = 64;
    let profile = hrrp(&sw, &freqs, &times, &HrrpConfig { range_bins: bins })?;
    let (resolution, unambiguous) = range_axes(wide.bandwidth, freqs[1] - freqs[0]);
    let expected_bin = (r0 / unambiguous * bins as f64).floor() as usize;
    let peaks_ok = (0..profile.power.ncols()).all(|j| profile.power.column(j).imax() == expected_bin);
    let res_ok = (resolution - 0.075).abs() <= 1e-3;
    let ru_ok = (unambiguous - 10.0).abs() <= 0.05;
    Ok(outcome(
        9,
        "synthesis physics",
        fraction > 0.9 && peaks_ok && res_ok && ru_ok,
        format!(
            "Doppler energy within +-1 bin of {f_d:.1} Hz: {:.1}% (> 90%); HRRP peak in bin {expected_bin} for r = {r0} m: {peaks_ok}; resolution {resolution:.5} m, unambiguous range {unambiguous:.3} m",
            100.0 * fraction
        ),
    ))
}

pub type Criterion = fn() -> Result<Outcome>;

/// Every criterion in order.
pub fn all() -> Vec<(u8, Criterion)> {
    vec![
        (1, solver_oracles as Criterion),
        (2, monotone_training),
        (3, reduction_identities),
        (4, denoising_effectiveness),
        (5, robustness_ordering),
        (6, baseline_gap),
        (7, test_time_ordering),
        (8, metric_identities),
        (9, synthesis_physics),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracles_agree_on_a_hand_case() {
        // orthonormal design: lasso solution is the soft threshold at μ/2
        let d = DMatrix::<f64>::identity(3, 3);
        let z = lasso_cd(&d, &[2.0, -0.2, 0.7], 0.6);
        assert!((z[0] - 1.7).abs() < 1e-15 && z[1] == 0.0 && (z[2] - 0.4).abs() < 1e-15);
        let a = DMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        let b = DMatrix::from_row_slice(1, 2, &[6.0, 8.0]);
        assert!((normal_equations(&a, &b, 0.0)[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn robustness_judgement() {
        let good = [[0.8, 0.6], [0.8, 0.7], [0.8, 0.75]];
        let bad = [[0.8, 0.79], [0.8, 0.7], [0.8, 0.75]];
        let (p, _) = judge_robustness(&[(Kind::Spectrogram, good), (Kind::Hrrp, good), (Kind::Frontal, bad)]);
        assert!(p);
        let (p, _) = judge_robustness(&[(Kind::Spectrogram, good), (Kind::Hrrp, bad), (Kind::Frontal, bad)]);
        assert!(!p);
    }
}
