//! Experiment configuration: a TOML file with `[dataset]`, `[training]`,
//! `[baselines]` and `[experiment]` sections. Every key is optional and
//! unknown keys are rejected.

use std::path::{Path, PathBuf};

use rdae_core::autoencoder::{Activation, TrainOptions};
use rdae_core::baselines::{SvdFilterConfig, WaveletFilterConfig};
use rdae_core::rng::derive_seed;
use rdae_core::solvers::{IstaOptions, Ridge, StepSize};
use rdae_core::synth::{ChannelModel, DatasetSpec, PhantomParams, SignatureKind, WallClass};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config_err, BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Spectrogram,
    Hrrp,
    Frontal,
}

impl Kind {
    pub fn signature(self) -> SignatureKind {
        match self {
            Kind::Spectrogram => SignatureKind::Spectrogram,
            Kind::Hrrp => SignatureKind::Hrrp,
            Kind::Frontal => SignatureKind::Frontal,
        }
    }

    pub fn name(self) -> &'static str {
        self.signature().name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Wall {
    #[serde(rename = "free-space")]
    FreeSpace,
    #[serde(rename = "low")]
    Low,
    #[serde(rename = "medium")]
    Medium,
    #[serde(rename = "high")]
    High,
}

impl Wall {
    pub fn class(self) -> WallClass {
        match self {
            Wall::FreeSpace => WallClass::FreeSpace,
            Wall::Low => WallClass::LowConductivity,
            Wall::Medium => WallClass::MediumConductivity,
            Wall::High => WallClass::HighConductivity,
        }
    }

    pub fn name(self) -> &'static str {
        self.class().name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "DAE")]
    Dae,
    #[serde(rename = "SparseDAE")]
    SparseDae,
    #[serde(rename = "StackedSDAE")]
    StackedSdae,
    #[serde(rename = "SVD")]
    Svd,
    #[serde(rename = "Wavelet")]
    Wavelet,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Dae,
        Algorithm::SparseDae,
        Algorithm::StackedSdae,
        Algorithm::Svd,
        Algorithm::Wavelet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dae => "DAE",
            Algorithm::SparseDae => "SparseDAE",
            Algorithm::StackedSdae => "StackedSDAE",
            Algorithm::Svd => "SVD",
            Algorithm::Wavelet => "Wavelet",
        }
    }

    pub fn is_learned(self) -> bool {
        matches!(self, Algorithm::Dae | Algorithm::SparseDae | Algorithm::StackedSdae)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationName {
    Linear,
    Tanh,
    Sigmoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetSection {
    pub kinds: Vec<Kind>,
    pub carriers_ghz: Vec<f64>,
    pub walls: Vec<Wall>,
    pub snr_db: Vec<f64>,
    pub scr_db: Vec<f64>,
    pub pfa: f64,
    /// Channel realizations per wall class.
    pub realizations: usize,
    pub intervals: usize,
    pub noise_draws: usize,
    pub frames: usize,
    pub bins: usize,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub stft_window_s: f64,
    pub walker_speed: f64,
    pub channel_spread: f64,
    pub wall_thickness_m: f64,
    pub gain_offset_db: f64,
    pub frontal_size: usize,
    pub frontal_subjects: usize,
    pub frontal_orientations: usize,
    /// Carrier recorded in result rows for frontal images.
    pub frontal_carrier_ghz: f64,
}

impl Default for DatasetSection {
    fn default() -> Self {
        Self {
            kinds: vec![Kind::Spectrogram],
            carriers_ghz: vec![2.4],
            walls: vec![Wall::Low],
            snr_db: vec![-10.0],
            scr_db: vec![f64::INFINITY],
            pfa: 0.0,
            realizations: 4,
            intervals: 8,
            noise_draws: 10,
            frames: 64,
            bins: 64,
            duration_s: 6.0,
            sample_rate_hz: 500.0,
            stft_window_s: 0.1,
            walker_speed: 1.0,
            channel_spread: 0.3,
            wall_thickness_m: 0.2,
            gain_offset_db: 0.0,
            frontal_size: 31,
            frontal_subjects: 5,
            frontal_orientations: 90,
            frontal_carrier_ghz: 7.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingSection {
    pub algorithms: Vec<Algorithm>,
    pub activation: ActivationName,
    /// Hidden width of DAE and SparseDAE.
    pub hidden: usize,
    pub stacked_sizes: [usize; 3],
    pub lambda: f64,
    pub mu: f64,
    pub coupling: [f64; 3],
    pub sparsity: [f64; 3],
    pub outer_iterations: usize,
    pub outer_tolerance: f64,
    pub ista_iterations: usize,
    pub ista_tolerance: f64,
    /// Fixed ridge for the least-squares blocks; scaled automatically if absent.
    pub ridge: Option<f64>,
}

impl Default for TrainingSection {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            activation: ActivationName::Linear,
            hidden: 500,
            stacked_sizes: [256, 128, 64],
            lambda: 1.0,
            mu: 0.1,
            coupling: [1.0; 3],
            sparsity: [0.1; 3],
            outer_iterations: 50,
            outer_tolerance: 1e-4,
            ista_iterations: 200,
            ista_tolerance: 1e-4,
            ridge: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineSection {
    pub svd_energy: f64,
    pub svd_rank: Option<usize>,
    pub wavelet_levels: usize,
    pub wavelet_keep: f64,
}

impl Default for BaselineSection {
    fn default() -> Self {
        let svd = SvdFilterConfig::default();
        let wav = WaveletFilterConfig::default();
        Self {
            svd_energy: svd.energy,
            svd_rank: svd.rank,
            wavelet_levels: wav.levels,
            wavelet_keep: wav.keep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// Training fraction of each dataset.
    pub split: f64,
    pub mismatch_pct: Vec<f64>,
    pub seeds: Vec<u64>,
    pub master_seed: u64,
    pub timing_passes: usize,
    pub output: PathBuf,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            split: 0.7,
            mismatch_pct: vec![0.0],
            seeds: vec![0, 1],
            master_seed: 0,
            timing_passes: 100,
            output: PathBuf::from("results"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSection,
    pub training: TrainingSection,
    pub baselines: BaselineSection,
    pub experiment: ExperimentSection,
}

/// One dataset to synthesise: every field that changes the generated pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub kind: Kind,
    pub carrier_ghz: f64,
    pub wall: Wall,
    pub snr_db: f64,
    pub scr_db: f64,
    pub seed: u64,
}

impl DataPoint {
    /// File-name stem for the generated pair.
    pub fn stem(&self) -> String {
        format!(
            "{}_{}ghz_{}_snr{}_scr{}_seed{}",
            self.kind.name(),
            self.carrier_ghz,
            self.wall.name(),
            self.snr_db,
            self.scr_db,
            self.seed
        )
    }
}

fn non_empty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return config_err(format!("{name} must not be empty"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            BenchError::Config(m) => BenchError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        let t = &self.training;
        let e = &self.experiment;
        non_empty("dataset.kinds", &d.kinds)?;
        non_empty("dataset.carriers_ghz", &d.carriers_ghz)?;
        non_empty("dataset.walls", &d.walls)?;
        non_empty("dataset.snr_db", &d.snr_db)?;
        non_empty("dataset.scr_db", &d.scr_db)?;
        non_empty("training.algorithms", &t.algorithms)?;
        non_empty("experiment.mismatch_pct", &e.mismatch_pct)?;
        non_empty("experiment.seeds", &e.seeds)?;
        if d.carriers_ghz.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
            return config_err("carriers must be positive");
        }
        if d.snr_db.iter().chain(&d.scr_db).any(|v| v.is_nan()) {
            return config_err("SNR and SCR grids must not contain NaN");
        }
        if !(e.split > 0.0 && e.split < 1.0) {
            return config_err(format!("experiment.split {} must be in (0, 1)", e.split));
        }
        if e.mismatch_pct.iter().any(|m| !(0.0..=100.0).contains(m)) {
            return config_err("mismatch percentages must lie in [0, 100]");
        }
        if e.timing_passes == 0 {
            return config_err("experiment.timing_passes must be at least 1");
        }
        if t.outer_iterations == 0 || t.ista_iterations == 0 {
            return config_err("iteration counts must be at least 1");
        }
        if t.ridge.is_some_and(|r| !(r >= 0.0 && r.is_finite())) {
            return config_err("training.ridge must be finite and non-negative");
        }
        let [l0, l1, l2] = t.stacked_sizes;
        if !(l0 > l1 && l1 > l2 && l2 > 0) {
            return config_err(format!("stacked_sizes must strictly decrease, got {:?}", t.stacked_sizes));
        }
        for k in &d.kinds {
            let p = self.pixels(*k);
            if t.hidden == 0 || t.hidden >= p {
                return config_err(format!("hidden = {} must be in 1..{p} for {} images", t.hidden, k.name()));
            }
            if l0 >= p {
                return config_err(format!("stacked_sizes[0] = {l0} must be below {p} for {} images", k.name()));
            }
        }
        // the core validators cover the remaining ranges
        for p in self.data_points() {
            self.dataset_spec(&p).validate()?;
            if self.columns(p.kind) < 4 {
                return config_err("datasets need at least four images");
            }
        }
        self.train_options(0).validate()?;
        Ok(())
    }

    /// Pixels per image for `kind`.
    pub fn pixels(&self, kind: Kind) -> usize {
        match kind {
            Kind::Frontal => self.dataset.frontal_size * self.dataset.frontal_size,
            _ => self.dataset.bins * self.dataset.frames,
        }
    }

    pub fn columns(&self, kind: Kind) -> usize {
        let d = &self.dataset;
        match kind {
            Kind::Frontal => d.frontal_subjects * d.frontal_orientations,
            _ => d.realizations * d.intervals * d.noise_draws,
        }
    }

    /// All datasets the config describes, in canonical order. Frontal
    /// images ignore the carrier and wall grids.
    pub fn data_points(&self) -> Vec<DataPoint> {
        let d = &self.dataset;
        let mut out = Vec::new();
        for &kind in &d.kinds {
            let (carriers, walls) = match kind {
                Kind::Frontal => (vec![d.frontal_carrier_ghz], vec![Wall::FreeSpace]),
                _ => (d.carriers_ghz.clone(), d.walls.clone()),
            };
            for &carrier_ghz in &carriers {
                for &wall in &walls {
                    for &snr_db in &d.snr_db {
                        for &scr_db in &d.scr_db {
                            for &seed in &self.experiment.seeds {
                                out.push(DataPoint {
                                    kind,
                                    carrier_ghz,
                                    wall,
                                    snr_db,
                                    scr_db,
                                    seed,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Generation spec for one data point. Seeds depend only on the master
    /// and replicate seeds, so SNR grid points share their noise fields up
    /// to scale.
    pub fn dataset_spec(&self, p: &DataPoint) -> DatasetSpec {
        let d = &self.dataset;
        let carrier = p.carrier_ghz * 1e9;
        let mut spec = match p.kind {
            Kind::Spectrogram => DatasetSpec::spectrogram(carrier, p.wall.class()),
            Kind::Hrrp => DatasetSpec::hrrp(carrier, p.wall.class()),
            Kind::Frontal => DatasetSpec::frontal(),
        };
        let master = self.experiment.master_seed;
        spec.seed = derive_seed(master, &[p.seed, 0xDA7A]);
        spec.snr_db = p.snr_db;
        spec.scr_db = p.scr_db;
        spec.pfa = d.pfa;
        spec.intervals = d.intervals;
        spec.noise_draws = d.noise_draws;
        spec.frames = d.frames;
        spec.bins = d.bins;
        spec.radar.duration = d.duration_s;
        spec.radar.sample_rate = d.sample_rate_hz;
        spec.radar.window = d.stft_window_s;
        spec.radar.gain_offset_db = d.gain_offset_db;
        spec.gait.speed = d.walker_speed;
        if p.wall != Wall::FreeSpace {
            spec.channel.spread = d.channel_spread;
            spec.channel.thickness = d.wall_thickness_m;
        }
        spec.channel = ChannelModel {
            realizations: d.realizations,
            seed: derive_seed(master, &[p.seed, 0xC4A7]),
            ..spec.channel
        };
        spec.phantom = PhantomParams {
            rows: d.frontal_size,
            cols: d.frontal_size,
            subjects: d.frontal_subjects,
            orientations: d.frontal_orientations,
        };
        spec
    }

    pub fn activation(&self) -> Activation {
        match self.training.activation {
            ActivationName::Linear => Activation::linear(),
            ActivationName::Tanh => Activation::tanh(),
            ActivationName::Sigmoid => Activation::sigmoid(),
        }
    }

    pub fn train_options(&self, seed: u64) -> TrainOptions {
        let t = &self.training;
        TrainOptions {
            activation: self.activation(),
            max_outer_iterations: t.outer_iterations,
            outer_tolerance: t.outer_tolerance,
            seed,
            ista: IstaOptions {
                max_iterations: t.ista_iterations,
                relative_tolerance: t.ista_tolerance,
                step: StepSize::Auto,
            },
            ridge: t.ridge.map_or(Ridge::Auto, Ridge::Fixed),
        }
    }

    pub fn svd(&self) -> SvdFilterConfig {
        SvdFilterConfig {
            rank: self.baselines.svd_rank,
            energy: self.baselines.svd_energy,
        }
    }

    pub fn wavelet(&self) -> WaveletFilterConfig {
        WaveletFilterConfig {
            levels: self.baselines.wavelet_levels,
            keep: self.baselines.wavelet_keep,
        }
    }

    /// SHA-256 of the canonical TOML rendering, as lowercase hex. The
    /// output directory does not affect results and is left out.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.experiment.output = PathBuf::new();
        let text = toml::to_string(&canonical).expect("config serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
