//! Sweep execution and the result CSV.

use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::experiment::{run_point, ResultRow};

pub const HEADER: [&str; 14] = [
    "algorithm",
    "kind",
    "carrier_ghz",
    "wall",
    "snr_db",
    "scr_db",
    "mismatch_pct",
    "ssim_bd",
    "ssim_ad",
    "nmse_bd",
    "nmse_ad",
    "train_s",
    "test_ms",
    "seed",
];

/// Columns left blank when hashing, since they hold wall-clock times.
const TIMING: [usize; 2] = [11, 12];

/// Sort key: kind, algorithm, then the grid point.
fn order(a: &ResultRow, b: &ResultRow) -> std::cmp::Ordering {
    a.kind
        .cmp(&b.kind)
        .then(a.algorithm.cmp(&b.algorithm))
        .then(a.carrier_ghz.total_cmp(&b.carrier_ghz))
        .then(a.wall.cmp(&b.wall))
        .then(a.snr_db.total_cmp(&b.snr_db))
        .then(a.scr_db.total_cmp(&b.scr_db))
        .then(a.mismatch_pct.total_cmp(&b.mismatch_pct))
        .then(a.seed.cmp(&b.seed))
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(order);
}

/// Runs every data point of `cfg` on a pool of `jobs` workers and returns
/// the sorted rows.
pub fn run_sweep(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<ResultRow>> {
    let points = cfg.data_points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Config(format!("cannot start {jobs} workers: {e}")))?;
    let per_point: Vec<Result<Vec<ResultRow>>> = pool.install(|| points.par_iter().map(|p| run_point(cfg, p)).collect());
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

fn record(row: &ResultRow) -> [String; 14] {
    [
        row.algorithm.name().to_string(),
        row.kind.name().to_string(),
        row.carrier_ghz.to_string(),
        row.wall.name().to_string(),
        row.snr_db.to_string(),
        row.scr_db.to_string(),
        row.mismatch_pct.to_string(),
        row.ssim_bd.to_string(),
        row.ssim_ad.to_string(),
        row.nmse_bd.to_string(),
        row.nmse_ad.to_string(),
        row.train_s.to_string(),
        row.test_ms.to_string(),
        row.seed.to_string(),
    ]
}

fn render(rows: &[ResultRow], blank_timing: bool) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for row in rows {
        let mut rec = record(row);
        if blank_timing {
            for i in TIMING {
                rec[i].clear();
            }
        }
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn to_csv(rows: &[ResultRow]) -> Vec<u8> {
    render(rows, false)
}

/// SHA-256 of the CSV with the timing columns blanked.
pub fn results_hash(rows: &[ResultRow]) -> String {
    hex::encode(Sha256::digest(render(rows, true)))
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    }
    std::fs::write(path, to_csv(rows)).map_err(|e| BenchError::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let csv_err = |e: csv::Error| BenchError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(HEADER) {
        return Err(BenchError::Csv {
            path: path.to_path_buf(),
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err)
}
