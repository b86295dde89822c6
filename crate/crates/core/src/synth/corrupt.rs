use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal};

use super::{signal_reference, ImageStack};
use crate::error::{invalid, Result};
use crate::rng::substream;

const NOISE: u64 = 0x4E01;
const CLUTTER: u64 = 0xC1u64;
const SHUFFLE: u64 = 0x5F1E;

/// `rows × cols` i.i.d. zero-mean Gaussian samples of the given variance.
pub fn gaussian_noise_field(rows: usize, cols: usize, variance: f64, seed: u64) -> DMatrix<f64> {
    let sd = variance.max(0.0).sqrt();
    let mut rng = substream(seed, &[NOISE]);
    DMatrix::from_fn(rows, cols, |_, _| sd * rng.sample::<f64, _>(StandardNormal))
}

/// Additive Gaussian noise at `snr_db` relative to the stack's own
/// [`signal_reference`]; see [`add_noise_with_reference`].
pub fn add_noise(stack: &ImageStack, snr_db: f64, seed: u64) -> Result<ImageStack> {
    add_noise_with_reference(stack, snr_db, signal_reference(stack.data()), seed)
}

/// Adds noise of variance `reference·10^(−snr_db/10)` to every pixel and
/// clamps to `[0, 1]`. Column `j` draws from its own substream of `seed`.
/// `snr_db = +∞` returns the input unchanged.
pub fn add_noise_with_reference(stack: &ImageStack, snr_db: f64, reference: f64, seed: u64) -> Result<ImageStack> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return invalid(format!("SNR {snr_db} dB is not usable"));
    }
    if !(reference >= 0.0 && reference.is_finite()) {
        return invalid("signal reference must be finite and non-negative");
    }
    if snr_db == f64::INFINITY {
        return Ok(stack.clone());
    }
    let sd = (reference * 10f64.powf(-snr_db / 10.0)).sqrt();
    let mut data = stack.data().clone();
    for (j, mut col) in data.column_iter_mut().enumerate() {
        let mut rng = substream(seed, &[NOISE, j as u64]);
        for v in col.iter_mut() {
            let n: f64 = rng.sample(StandardNormal);
            *v = (*v + sd * n).clamp(0.0, 1.0);
        }
    }
    stack.with_data(data)
}

/// Coarse cell grid laid over an image; each cell may host one clutter site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClutterGrid {
    pub rows: usize,
    pub cols: usize,
}

impl Default for ClutterGrid {
    /// 84 cells, so a false-alarm probability of 0.06 yields about 5 sites.
    fn default() -> Self {
        Self { rows: 7, cols: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClutterSite {
    pub row: usize,
    pub col: usize,
    pub amplitude: Complex64,
}

/// Draws clutter sites for one `image_rows × image_cols` image: each grid
/// cell is occupied with probability `pfa`, at a uniformly chosen pixel of
/// the cell, with magnitude `√power` and uniform phase.
pub fn clutter_sites(
    grid: ClutterGrid,
    image_rows: usize,
    image_cols: usize,
    pfa: f64,
    power: f64,
    rng: &mut impl Rng,
) -> Result<Vec<ClutterSite>> {
    if !(0.0..=1.0).contains(&pfa) {
        return invalid(format!("false-alarm probability {pfa} outside [0, 1]"));
    }
    if grid.rows == 0 || grid.cols == 0 || grid.rows > image_rows || grid.cols > image_cols {
        return invalid("clutter grid must be non-empty and no finer than the image");
    }
    if !(power >= 0.0 && power.is_finite()) {
        return invalid("clutter power must be finite and non-negative");
    }
    let hit = Bernoulli::new(pfa).map_err(|e| crate::Error::InvalidConfig(e.to_string()))?;
    let edges = |n: usize, cells: usize, i: usize| (i * n / cells, (i + 1) * n / cells);
    let mut sites = Vec::new();
    for gr in 0..grid.rows {
        for gc in 0..grid.cols {
            if !hit.sample(rng) {
                continue;
            }
            let (r0, r1) = edges(image_rows, grid.rows, gr);
            let (c0, c1) = edges(image_cols, grid.cols, gc);
            let row = rng.random_range(r0..r1);
            let col = rng.random_range(c0..c1);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            sites.push(ClutterSite {
                row,
                col,
                amplitude: Complex64::from_polar(power.sqrt(), phase),
            });
        }
    }
    Ok(sites)
}

/// Point clutter at `scr_db` relative to the stack's own signal reference.
pub fn add_point_clutter(stack: &ImageStack, scr_db: f64, pfa: f64, grid: ClutterGrid, seed: u64) -> Result<ImageStack> {
    add_point_clutter_with_reference(stack, scr_db, pfa, grid, signal_reference(stack.data()), seed)
}

/// Each clutter site replaces pixel `v` by `|v + c|` clamped to `[0, 1]`,
/// treating the pixel as a zero-phase amplitude.
pub fn add_point_clutter_with_reference(
    stack: &ImageStack,
    scr_db: f64,
    pfa: f64,
    grid: ClutterGrid,
    reference: f64,
    seed: u64,
) -> Result<ImageStack> {
    if scr_db.is_nan() {
        return invalid("SCR must not be NaN");
    }
    if !(0.0..=1.0).contains(&pfa) {
        return invalid(format!("false-alarm probability {pfa} outside [0, 1]"));
    }
    if pfa == 0.0 || scr_db == f64::INFINITY {
        return Ok(stack.clone());
    }
    let power = reference * 10f64.powf(-scr_db / 10.0);
    let (rows, cols) = stack.image_shape();
    let mut data = stack.data().clone();
    for j in 0..data.ncols() {
        let mut rng = substream(seed, &[CLUTTER, j as u64]);
        for s in clutter_sites(grid, rows, cols, pfa, power, &mut rng)? {
            let v = &mut data[(s.row + s.col * rows, j)];
            *v = (s.amplitude + *v).norm().clamp(0.0, 1.0);
        }
    }
    stack.with_data(data)
}

/// Outcome of [`shuffle_labels`]: output column `j` is input column
/// `permutation[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelShuffle {
    pub permutation: Vec<usize>,
}

impl LabelShuffle {
    pub fn moved(&self) -> usize {
        self.permutation.iter().enumerate().filter(|(j, &p)| *j != p).count()
    }
}

fn fraction_count(fraction: f64, n: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&fraction) {
        return invalid(format!("mismatch fraction {fraction} outside [0, 1]"));
    }
    Ok((fraction * n as f64 + 1e-9).floor() as usize)
}

/// Random permutation of `0..n` that moves `k` randomly chosen positions
/// and fixes all others. With `k = 1` nothing can move.
fn partial_derangement(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    if k < 2 {
        return perm;
    }
    let chosen: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
    let mut order: Vec<usize> = (0..k).collect();
    loop {
        order.shuffle(rng);
        if order.iter().enumerate().all(|(i, &o)| i != o) {
            break;
        }
    }
    for (i, &o) in order.iter().enumerate() {
        perm[chosen[i]] = chosen[o];
    }
    perm
}

/// Breaks the pairing of `⌊fraction·Q⌋` randomly chosen columns by deranging
/// them among themselves; column metadata moves with the data.
pub fn shuffle_labels(stack: &ImageStack, fraction: f64, seed: u64) -> Result<(ImageStack, LabelShuffle)> {
    let k = fraction_count(fraction, stack.len())?;
    let mut rng = substream(seed, &[SHUFFLE]);
    let permutation = partial_derangement(stack.len(), k, &mut rng);
    Ok((stack.select(&permutation)?, LabelShuffle { permutation }))
}

/// Alternative mismatch model: within every column, `⌊fraction·P⌋` randomly
/// chosen pixels are deranged among themselves.
pub fn shuffle_pixels(stack: &ImageStack, fraction: f64, seed: u64) -> Result<ImageStack> {
    let k = fraction_count(fraction, stack.pixels())?;
    let src = stack.data();
    let mut data = src.clone();
    for j in 0..src.ncols() {
        let mut rng = substream(seed, &[SHUFFLE, 1, j as u64]);
        let perm = partial_derangement(src.nrows(), k, &mut rng);
        for (i, &p) in perm.iter().enumerate() {
            data[(i, j)] = src[(p, j)];
        }
    }
    stack.with_data(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{ColumnMeta, SignatureKind, WallClass};

    fn stack(p: usize, q: usize) -> ImageStack {
        let data = DMatrix::from_fn(p, q, |i, j| ((i * 7 + j * 3) % 11) as f64 / 10.0);
        let meta = (0..q)
            .map(|j| ColumnMeta {
                interval: j as u16,
                realization: 1,
                wall: WallClass::FreeSpace,
            })
            .collect();
        let side = (p as f64).sqrt() as usize;
        ImageStack::new(data, side, p / side, SignatureKind::Generic, meta).unwrap()
    }

    #[test]
    fn infinite_snr_is_identity_and_noise_is_seeded() {
        let s = stack(16, 5);
        assert_eq!(add_noise(&s, f64::INFINITY, 1).unwrap(), s);
        let a = add_noise(&s, 0.0, 9).unwrap();
        assert_eq!(a, add_noise(&s, 0.0, 9).unwrap());
        assert_ne!(a, add_noise(&s, 0.0, 10).unwrap());
        assert!(a.is_normalized());
    }

    #[test]
    fn clutter_identity_cases_and_errors() {
        let s = stack(961, 4);
        assert_eq!(add_point_clutter(&s, 0.0, 0.0, ClutterGrid::default(), 3).unwrap(), s);
        assert!(add_point_clutter(&s, 0.0, 1.5, ClutterGrid::default(), 3).is_err());
        let c = add_point_clutter(&s, 0.0, 0.5, ClutterGrid::default(), 3).unwrap();
        assert_ne!(c, s);
        assert!(c.is_normalized());
    }

    #[test]
    fn two_column_shuffle_swaps() {
        let s = stack(4, 2);
        let (out, sh) = shuffle_labels(&s, 1.0, 0).unwrap();
        assert_eq!(sh.permutation, vec![1, 0]);
        assert_eq!(out.data().column(0), s.data().column(1));
        let (same, sh) = shuffle_labels(&s, 0.0, 0).unwrap();
        assert_eq!(same, s);
        assert_eq!(sh.moved(), 0);
        assert!(shuffle_labels(&s, -0.1, 0).is_err());
    }

    #[test]
    fn single_selected_column_stays_put() {
        let s = stack(4, 3);
        let (out, sh) = shuffle_labels(&s, 0.4, 5).unwrap();
        assert_eq!(sh.moved(), 0);
        assert_eq!(out, s);
    }

    #[test]
    fn pixel_shuffle_permutes_within_columns() {
        let s = stack(16, 3);
        let out = shuffle_pixels(&s, 0.5, 2).unwrap();
        for j in 0..3 {
            let mut a: Vec<f64> = s.data().column(j).iter().copied().collect();
            let mut b: Vec<f64> = out.data().column(j).iter().copied().collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
        }
    }
}
