//! Bodies of the `generate` and `train` subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rdae_core::autoencoder::write_weights;
use rdae_core::synth::save_dataset;

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::experiment::{dataset, prepare, train, train_seed};

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Config(format!("cannot start {jobs} workers: {e}")))
}

fn mkdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}

/// Writes every configured dataset under `out/data`; returns the manifests.
pub fn generate(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<Vec<PathBuf>> {
    let dir = out.join("data");
    mkdir(&dir)?;
    let points = cfg.data_points();
    pool(jobs)?.install(|| {
        points
            .par_iter()
            .map(|p| {
                let pair = dataset(cfg, p)?;
                let manifest = dir.join(format!("{}.manifest", p.stem()));
                save_dataset(&pair, &manifest).map_err(|e| match e {
                    rdae_core::Error::Io(io) => BenchError::io(&manifest, io),
                    other => other.into(),
                })?;
                Ok(manifest)
            })
            .collect()
    })
}

/// Trains the learned algorithms at every data point and mismatch level,
/// writing weights to `out/models` and objective traces to `out/traces`.
/// Returns the trace files.
pub fn train_all(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<Vec<PathBuf>> {
    let models = out.join("models");
    let traces = out.join("traces");
    mkdir(&models)?;
    mkdir(&traces)?;
    let points = cfg.data_points();
    let per_point: Vec<Result<Vec<PathBuf>>> = pool(jobs)?.install(|| {
        points
            .par_iter()
            .map(|p| {
                let pair = dataset(cfg, p)?;
                let mut written = Vec::new();
                for &mm in &cfg.experiment.mismatch_pct {
                    let prep = prepare(cfg, &pair, p.seed, mm)?;
                    for &alg in cfg.training.algorithms.iter().filter(|a| a.is_learned()) {
                        let t = train(cfg, alg, prep.train_clean.data(), prep.train_corrupt.data(), train_seed(cfg, p.seed, alg))?;
                        let stem = format!("{}_mismatch{mm}_{}", p.stem(), alg.name());
                        let wpath = models.join(format!("{stem}.rdaew"));
                        let file = std::fs::File::create(&wpath).map_err(|e| BenchError::io(&wpath, e))?;
                        write_weights(&t.weights, std::io::BufWriter::new(file))?;
                        let mut text = String::from("iteration,objective,seconds\n");
                        writeln!(text, "0,{},0", t.trace.initial_objective).unwrap();
                        for (i, (o, s)) in t.trace.objectives.iter().zip(&t.trace.wall_times).enumerate() {
                            writeln!(text, "{},{o},{s}", i + 1).unwrap();
                        }
                        let tpath = traces.join(format!("{stem}.csv"));
                        std::fs::write(&tpath, text).map_err(|e| BenchError::io(&tpath, e))?;
                        written.push(tpath);
                    }
                }
                Ok(written)
            })
            .collect()
    });
    let mut all = Vec::new();
    for r in per_point {
        all.extend(r?);
    }
    Ok(all)
}
