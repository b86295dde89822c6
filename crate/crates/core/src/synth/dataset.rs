use nalgebra::DMatrix;
use rand::seq::SliceRandom;

use super::{
    add_noise_with_reference, add_point_clutter_with_reference, frontal_phantom, gait_trajectory, hrrp,
    radar_returns, signal_reference, spectrogram, to_db_normalize, ChannelModel, ClutterGrid, ColumnMeta,
    DynamicRange, GaitParams, HrrpConfig, ImageStack, PhantomParams, RadarConfig, RadarPosition, StftConfig,
    WallClass,
};
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, substream};

/// What the pixels of a stack represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignatureKind {
    Spectrogram,
    Hrrp,
    Frontal,
    Generic,
}

impl SignatureKind {
    pub fn name(self) -> &'static str {
        match self {
            SignatureKind::Spectrogram => "spectrogram",
            SignatureKind::Hrrp => "hrrp",
            SignatureKind::Frontal => "frontal",
            SignatureKind::Generic => "generic",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Self::Spectrogram, Self::Hrrp, Self::Frontal, Self::Generic]
            .into_iter()
            .find(|k| k.name() == s)
    }

    pub(crate) fn tag(self) -> u8 {
        self as u8
    }

    pub(crate) fn from_tag(t: u8) -> Option<Self> {
        [Self::Spectrogram, Self::Hrrp, Self::Frontal, Self::Generic]
            .get(t as usize)
            .copied()
    }
}

/// Everything needed to regenerate a clean/corrupt dataset.
///
/// Simulated kinds produce `realizations × intervals × noise_draws` columns:
/// the clean column is the free-space image of the interval, the corrupt
/// column the same interval seen through realization η of `channel` plus
/// pixel noise. Frontal datasets produce one column per subject and
/// orientation, corrupted by noise and point clutter.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub kind: SignatureKind,
    pub radar: RadarConfig,
    pub gait: GaitParams,
    pub radar_position: RadarPosition,
    pub channel: ChannelModel,
    pub intervals: usize,
    /// Time columns per interval image.
    pub frames: usize,
    /// Doppler rows (spectrograms) or range rows (HRRP).
    pub bins: usize,
    pub noise_draws: usize,
    pub snr_db: f64,
    pub scr_db: f64,
    pub pfa: f64,
    pub clutter_grid: ClutterGrid,
    pub dynamic_range: DynamicRange,
    pub phantom: PhantomParams,
    pub seed: u64,
}

/// Display window used for each signature kind and carrier.
pub fn default_dynamic_range(kind: SignatureKind, carrier: f64) -> DynamicRange {
    let (floor_db, ceil_db) = match kind {
        SignatureKind::Hrrp if carrier >= 7.5e9 => (-90.0, -50.0),
        SignatureKind::Hrrp if carrier >= 3.7e9 => (-80.0, -40.0),
        SignatureKind::Hrrp => (-70.0, -30.0),
        _ => (-70.0, -20.0),
    };
    DynamicRange { floor_db, ceil_db }
}

impl DatasetSpec {
    pub fn spectrogram(carrier: f64, wall: WallClass) -> Self {
        Self {
            kind: SignatureKind::Spectrogram,
            radar: RadarConfig::narrowband(carrier),
            gait: GaitParams::default(),
            radar_position: RadarPosition::default(),
            channel: ChannelModel::wall(wall),
            intervals: 8,
            frames: 64,
            bins: 64,
            noise_draws: 10,
            snr_db: -10.0,
            scr_db: f64::INFINITY,
            pfa: 0.0,
            clutter_grid: ClutterGrid::default(),
            dynamic_range: default_dynamic_range(SignatureKind::Spectrogram, carrier),
            phantom: PhantomParams::default(),
            seed: 0,
        }
    }

    pub fn hrrp(carrier: f64, wall: WallClass) -> Self {
        Self {
            kind: SignatureKind::Hrrp,
            radar: RadarConfig::wideband(carrier),
            dynamic_range: default_dynamic_range(SignatureKind::Hrrp, carrier),
            ..Self::spectrogram(carrier, wall)
        }
    }

    pub fn frontal() -> Self {
        Self {
            kind: SignatureKind::Frontal,
            channel: ChannelModel::free_space(),
            snr_db: 20.0,
            scr_db: 0.0,
            pfa: 0.06,
            ..Self::spectrogram(2.4e9, WallClass::FreeSpace)
        }
    }

    /// Number of columns [`generate_pair`] produces.
    pub fn columns(&self) -> usize {
        match self.kind {
            SignatureKind::Frontal => self.phantom.subjects * self.phantom.orientations,
            _ => self.channel.realizations * self.intervals * self.noise_draws,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_nan() || self.scr_db.is_nan() {
            return invalid("SNR and SCR must not be NaN");
        }
        if !(0.0..=1.0).contains(&self.pfa) {
            return invalid(format!("false-alarm probability {} outside [0, 1]", self.pfa));
        }
        match self.kind {
            SignatureKind::Generic => invalid("generic datasets cannot be synthesised"),
            SignatureKind::Frontal => Ok(()),
            SignatureKind::Spectrogram | SignatureKind::Hrrp => {
                self.radar.validate()?;
                self.channel.validate()?;
                if self.intervals == 0 || self.frames == 0 || self.bins == 0 || self.noise_draws == 0 {
                    return invalid("intervals, frames, bins and noise draws must be positive");
                }
                if self.kind == SignatureKind::Spectrogram && !self.radar.is_narrowband() {
                    return invalid("spectrograms need a narrowband radar");
                }
                if self.kind == SignatureKind::Hrrp && self.radar.is_narrowband() {
                    return invalid("range profiles need a wideband radar");
                }
                if self.channel.realizations > u16::MAX as usize || self.intervals > u16::MAX as usize {
                    return invalid("too many realizations or intervals");
                }
                Ok(())
            }
        }
    }

    fn hop(&self) -> f64 {
        self.radar.duration / (self.intervals * self.frames) as f64
    }

    /// One image per interval for realization `eta` of `channel`.
    fn interval_images(&self, channel: &ChannelModel, eta: usize) -> Result<Vec<DMatrix<f64>>> {
        let r = &self.radar;
        let track = gait_trajectory(&self.gait, &self.radar_position, r.duration, r.sample_rate)?;
        let s = radar_returns(&track, channel, r, eta)?;
        let power = match self.kind {
            SignatureKind::Spectrogram => {
                let cfg = StftConfig {
                    sample_rate: r.sample_rate,
                    window: r.window,
                    n_fft: self.bins,
                    hop: self.hop(),
                };
                let column: Vec<_> = s.column(0).iter().copied().collect();
                spectrogram(&column, &cfg)?.power
            }
            _ => {
                let n = self.intervals * self.frames;
                let times: Vec<usize> = (0..n)
                    .map(|k| (((k as f64 + 0.5) * self.hop() * r.sample_rate) as usize).min(s.nrows() - 1))
                    .collect();
                let cfg = HrrpConfig { range_bins: self.bins };
                hrrp(&s, &r.frequencies(), &times, &cfg)?.power
            }
        };
        if power.ncols() < self.intervals * self.frames {
            return invalid("signal too short for the requested frames");
        }
        (0..self.intervals)
            .map(|i| to_db_normalize(&power.columns(i * self.frames, self.frames).into_owned(), self.dynamic_range))
            .collect()
    }
}

/// Clean targets, corrupt inputs and the hash of the generating config.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    pub clean: ImageStack,
    pub corrupt: ImageStack,
    pub config_hash: String,
    /// Generation seeds: dataset master seed, then channel seed.
    pub seeds: Vec<u64>,
}

impl PairedDataset {
    pub fn new(clean: ImageStack, corrupt: ImageStack, config_hash: impl Into<String>) -> Result<Self> {
        if clean.data().shape() != corrupt.data().shape() || clean.image_shape() != corrupt.image_shape() {
            return invalid("clean and corrupt stacks differ in shape");
        }
        Ok(Self {
            clean,
            corrupt,
            config_hash: config_hash.into(),
            seeds: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.clean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clean.is_empty()
    }

    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let mut out = Self::new(self.clean.select(idx)?, self.corrupt.select(idx)?, self.config_hash.clone())?;
        out.seeds = self.seeds.clone();
        Ok(out)
    }

    /// Random split with `round(train_fraction·Q)` training columns.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return invalid(format!("train fraction {train_fraction} must be in (0, 1)"));
        }
        let q = self.len();
        let n_train = (train_fraction * q as f64).round() as usize;
        if n_train == 0 || n_train == q {
            return invalid("split leaves an empty side");
        }
        let mut idx: Vec<usize> = (0..q).collect();
        idx.shuffle(&mut substream(seed, &[0x5917]));
        let (train, test) = idx.split_at(n_train);
        Ok((self.select(train)?, self.select(test)?))
    }
}

/// Synthesises the paired dataset described by `spec`. The returned
/// `config_hash` is empty; callers that persist datasets fill it in.
pub fn generate_pair(spec: &DatasetSpec) -> Result<PairedDataset> {
    spec.validate()?;
    if spec.kind == SignatureKind::Frontal {
        return generate_frontal(spec);
    }
    let clean_images = spec.interval_images(&ChannelModel::free_space(), 1)?;
    let wall = spec.channel.wall;
    let mut clean = Vec::with_capacity(spec.columns());
    let mut corrupt = Vec::with_capacity(spec.columns());
    let mut meta = Vec::with_capacity(spec.columns());
    for eta in 1..=spec.channel.realizations {
        let seen = spec.interval_images(&spec.channel, eta)?;
        for (i, img) in seen.iter().enumerate() {
            for _ in 0..spec.noise_draws {
                clean.push(clean_images[i].clone());
                corrupt.push(img.clone());
                meta.push(ColumnMeta {
                    interval: i as u16,
                    realization: eta as u16,
                    wall,
                });
            }
        }
    }
    finish(spec, &clean, &corrupt, meta)
}

fn generate_frontal(spec: &DatasetSpec) -> Result<PairedDataset> {
    let p = &spec.phantom;
    if p.subjects > u16::MAX as usize || p.orientations > u16::MAX as usize {
        return invalid("too many subjects or orientations");
    }
    let mut images = Vec::with_capacity(spec.columns());
    let mut meta = Vec::with_capacity(spec.columns());
    for s in 0..p.subjects {
        for o in 0..p.orientations {
            images.push(frontal_phantom(p, s, o)?);
            meta.push(ColumnMeta {
                interval: o as u16,
                realization: s as u16 + 1,
                wall: WallClass::FreeSpace,
            });
        }
    }
    finish(spec, &images, &images, meta)
}

fn finish(
    spec: &DatasetSpec,
    clean: &[DMatrix<f64>],
    corrupt: &[DMatrix<f64>],
    meta: Vec<ColumnMeta>,
) -> Result<PairedDataset> {
    let clean = ImageStack::from_images(clean, spec.kind, meta.clone())?;
    let corrupt = ImageStack::from_images(corrupt, spec.kind, meta)?;
    let reference = signal_reference(clean.data());
    let corrupt = add_point_clutter_with_reference(
        &corrupt,
        spec.scr_db,
        spec.pfa,
        spec.clutter_grid,
        reference,
        derive_seed(spec.seed, &[1]),
    )?;
    let corrupt = add_noise_with_reference(&corrupt, spec.snr_db, reference, derive_seed(spec.seed, &[2]))?;
    let mut pair = PairedDataset::new(clean, corrupt, "")?;
    pair.seeds = vec![spec.seed, spec.channel.seed];
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: SignatureKind, wall: WallClass) -> DatasetSpec {
        let mut s = match kind {
            SignatureKind::Hrrp => DatasetSpec::hrrp(2.4e9, wall),
            _ => DatasetSpec::spectrogram(2.4e9, wall),
        };
        s.radar.duration = 1.6;
        s.intervals = 2;
        s.frames = 16;
        s.bins = 64;
        s.noise_draws = 2;
        s.channel.realizations = s.channel.realizations.min(2);
        s
    }

    #[test]
    fn free_space_without_noise_is_clean() {
        let mut s = small(SignatureKind::Spectrogram, WallClass::FreeSpace);
        s.snr_db = f64::INFINITY;
        let d = generate_pair(&s).unwrap();
        assert_eq!(d.clean, d.corrupt);
        assert_eq!(d.len(), 4);
        assert_eq!(d.clean.image_shape(), (64, 16));
        assert!(d.clean.data().max() > 0.5);
    }

    #[test]
    fn wall_datasets_share_metadata_and_are_normalized() {
        for kind in [SignatureKind::Spectrogram, SignatureKind::Hrrp] {
            let s = small(kind, WallClass::LowConductivity);
            let d = generate_pair(&s).unwrap();
            assert_eq!(d.len(), s.columns());
            assert_eq!(d.clean.columns(), d.corrupt.columns());
            assert!(d.clean.is_normalized() && d.corrupt.is_normalized());
            assert_ne!(d.clean.data(), d.corrupt.data());
            assert_eq!(generate_pair(&s).unwrap(), d);
        }
    }

    #[test]
    fn frontal_corpus_layout() {
        let mut s = DatasetSpec::frontal();
        s.phantom.orientations = 4;
        let d = generate_pair(&s).unwrap();
        assert_eq!(d.len(), 20);
        assert_eq!(d.clean.image_shape(), (31, 31));
        let (tr, te) = d.split(0.8, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (16, 4));
    }

    #[test]
    fn rejects_inconsistent_specs() {
        let mut s = small(SignatureKind::Spectrogram, WallClass::FreeSpace);
        s.radar = RadarConfig::wideband(2.4e9);
        assert!(generate_pair(&s).is_err());
        let mut s = small(SignatureKind::Hrrp, WallClass::FreeSpace);
        s.pfa = 2.0;
        assert!(generate_pair(&s).is_err());
    }
}
