//! Aggregation of sweep rows into summary tables and gnuplot data files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{Algorithm, Kind, Wall};
use crate::error::{BenchError, Result};
use crate::experiment::ResultRow;

/// Mean and `max − min` over the non-diverged rows of a group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub spread: f64,
}

impl Stat {
    fn of(values: impl Iterator<Item = f64>) -> Stat {
        let v: Vec<f64> = values.collect();
        if v.is_empty() {
            return Stat {
                mean: f64::NAN,
                spread: f64::NAN,
            };
        }
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        Stat {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            spread: max - min,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: usize,
    pub diverged: usize,
    pub ssim_bd: Stat,
    pub ssim_ad: Stat,
    pub nmse_bd: Stat,
    pub nmse_ad: Stat,
    pub train_s: Stat,
    pub test_ms: Stat,
}

fn summarise(rows: &[&ResultRow]) -> Summary {
    let ok: Vec<&&ResultRow> = rows.iter().filter(|r| !r.diverged()).collect();
    let stat = |f: fn(&ResultRow) -> f64| Stat::of(ok.iter().map(|r| f(r)));
    Summary {
        rows: rows.len(),
        diverged: rows.len() - ok.len(),
        ssim_bd: stat(|r| r.ssim_bd),
        ssim_ad: stat(|r| r.ssim_ad),
        nmse_bd: stat(|r| r.nmse_bd),
        nmse_ad: stat(|r| r.nmse_ad),
        train_s: stat(|r| r.train_s),
        test_ms: stat(|r| r.test_ms),
    }
}

/// Float key with a total order, for grouping grid coordinates.
#[derive(Debug, Clone, Copy)]
struct F(f64);

impl PartialEq for F {
    fn eq(&self, o: &Self) -> bool {
        self.0.total_cmp(&o.0).is_eq()
    }
}
impl Eq for F {}
impl PartialOrd for F {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for F {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Table-II style summary: one line per (kind, algorithm), averaged over
/// every grid point and seed.
pub fn table(rows: &[ResultRow]) -> Vec<((Kind, Algorithm), Summary)> {
    let mut groups: BTreeMap<(Kind, Algorithm), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.kind, r.algorithm)).or_default().push(r);
    }
    groups.into_iter().map(|(k, g)| (k, summarise(&g))).collect()
}

/// Grid coordinates other than the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Point {
    kind: Kind,
    carrier: F,
    wall: Wall,
    snr: F,
    scr: F,
    mismatch: F,
}

fn point(r: &ResultRow) -> Point {
    Point {
        kind: r.kind,
        carrier: F(r.carrier_ghz),
        wall: r.wall,
        snr: F(r.snr_db),
        scr: F(r.scr_db),
        mismatch: F(r.mismatch_pct),
    }
}

/// Per grid point and algorithm, aggregated over seeds.
fn grid(rows: &[ResultRow]) -> BTreeMap<(Point, Algorithm), Summary> {
    let mut groups: BTreeMap<(Point, Algorithm), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((point(r), r.algorithm)).or_default().push(r);
    }
    groups.into_iter().map(|(k, g)| (k, summarise(&g))).collect()
}

const TABLE_HEADER: &str =
    "kind,algorithm,rows,diverged,ssim_bd,ssim_ad,ssim_ad_spread,nmse_bd,nmse_ad,nmse_ad_spread,train_s,test_ms";

pub fn table_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("{TABLE_HEADER}\n");
    for ((kind, alg), s) in table(rows) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            kind.name(),
            alg.name(),
            s.rows,
            s.diverged,
            s.ssim_bd.mean,
            s.ssim_ad.mean,
            s.ssim_ad.spread,
            s.nmse_bd.mean,
            s.nmse_ad.mean,
            s.nmse_ad.spread,
            s.train_s.mean,
            s.test_ms.mean
        )
        .unwrap();
    }
    out
}

/// Fixed-width text rendering of [`table`].
pub fn table_text(rows: &[ResultRow]) -> String {
    let mut out = format!(
        "{:<12} {:<12} {:>9} {:>9} {:>10} {:>10} {:>10} {:>10} {:>6} {:>8}\n",
        "kind", "algorithm", "SSIM(BD)", "SSIM(AD)", "NMSE(BD)", "NMSE(AD)", "train s", "test ms", "rows", "diverged"
    );
    for ((kind, alg), s) in table(rows) {
        writeln!(
            out,
            "{:<12} {:<12} {:>9.4} {:>9.4} {:>10.4} {:>10.4} {:>10.2} {:>10.3} {:>6} {:>8}",
            kind.name(),
            alg.name(),
            s.ssim_bd.mean,
            s.ssim_ad.mean,
            s.nmse_bd.mean,
            s.nmse_ad.mean,
            s.train_s.mean,
            s.test_ms.mean,
            s.rows,
            s.diverged
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Snr,
    Scr,
    Mismatch,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::Snr => "snr_db",
            Axis::Scr => "scr_db",
            Axis::Mismatch => "mismatch_pct",
        }
    }

    fn get(self, p: &Point) -> F {
        match self {
            Axis::Snr => p.snr,
            Axis::Scr => p.scr,
            Axis::Mismatch => p.mismatch,
        }
    }

    /// `p` with this axis zeroed, identifying the curve it belongs to.
    fn curve(self, p: &Point) -> Point {
        let mut c = *p;
        match self {
            Axis::Snr => c.snr = F(0.0),
            Axis::Scr => c.scr = F(0.0),
            Axis::Mismatch => c.mismatch = F(0.0),
        }
        c
    }
}

/// A plot-ready file: name and contents.
pub struct DatFile {
    pub name: String,
    pub text: String,
}

/// One file per (curve, metric) for every axis with more than one value.
/// Columns: axis value, then mean and spread of the before-denoising
/// score and of each algorithm's after-denoising score.
pub fn dat_files(rows: &[ResultRow]) -> Vec<DatFile> {
    let g = grid(rows);
    let algs: Vec<Algorithm> = {
        let mut a: Vec<Algorithm> = rows.iter().map(|r| r.algorithm).collect();
        a.sort();
        a.dedup();
        a
    };
    let mut files = Vec::new();
    for axis in [Axis::Snr, Axis::Scr, Axis::Mismatch] {
        let mut curves: BTreeMap<Point, Vec<F>> = BTreeMap::new();
        for (p, _) in g.keys() {
            curves.entry(axis.curve(p)).or_default().push(axis.get(p));
        }
        for (curve, mut xs) in curves {
            xs.sort();
            xs.dedup();
            if xs.len() < 2 {
                continue;
            }
            for metric in ["ssim", "nmse"] {
                let mut fixed = vec![
                    format!("kind={}", curve.kind.name()),
                    format!("carrier_ghz={}", curve.carrier.0),
                    format!("wall={}", curve.wall.name()),
                ];
                let mut stem = vec![curve.kind.name().to_string(), format!("{}ghz", curve.carrier.0), curve.wall.name().to_string()];
                for other in [Axis::Snr, Axis::Scr, Axis::Mismatch] {
                    if other != axis {
                        fixed.push(format!("{}={}", other.name(), other.get(&curve).0));
                        stem.push(format!("{}{}", other.name(), other.get(&curve).0));
                    }
                }
                let mut text = format!("# {metric} vs {}; {}\n# {}", axis.name(), fixed.join(" "), axis.name());
                text.push_str(" BD BD_spread");
                for a in &algs {
                    write!(text, " {0} {0}_spread", a.name()).unwrap();
                }
                text.push('\n');
                for x in &xs {
                    let mut p = curve;
                    match axis {
                        Axis::Snr => p.snr = *x,
                        Axis::Scr => p.scr = *x,
                        Axis::Mismatch => p.mismatch = *x,
                    }
                    let pick = |s: &Summary, bd: bool| match (metric, bd) {
                        ("ssim", true) => s.ssim_bd,
                        ("ssim", false) => s.ssim_ad,
                        (_, true) => s.nmse_bd,
                        _ => s.nmse_ad,
                    };
                    let bd = algs.iter().find_map(|a| g.get(&(p, *a))).map(|s| pick(s, true));
                    let nan = Stat {
                        mean: f64::NAN,
                        spread: f64::NAN,
                    };
                    let bd = bd.unwrap_or(nan);
                    write!(text, "{} {} {}", x.0, bd.mean, bd.spread).unwrap();
                    for a in &algs {
                        let s = g.get(&(p, *a)).map(|s| pick(s, false)).unwrap_or(nan);
                        write!(text, " {} {}", s.mean, s.spread).unwrap();
                    }
                    text.push('\n');
                }
                files.push(DatFile {
                    name: format!("{}_vs_{}_{metric}.dat", stem.join("_"), axis.name()),
                    text,
                });
            }
        }
    }
    files
}

/// Writes `summary.csv`, `summary.txt` and the `.dat` files into `dir`;
/// returns the paths written.
pub fn write_report(rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put("summary.csv", &table_csv(rows))?;
    put("summary.txt", &table_text(rows))?;
    for f in dat_files(rows) {
        put(&f.name, &f.text)?;
    }
    Ok(written)
}
