use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, invalid, Result};
use crate::rng::substream;
use crate::SPEED_OF_LIGHT;

const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Propagation environment between radar and target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WallClass {
    FreeSpace,
    LowConductivity,
    MediumConductivity,
    HighConductivity,
}

impl WallClass {
    pub const ALL: [WallClass; 4] = [
        WallClass::FreeSpace,
        WallClass::LowConductivity,
        WallClass::MediumConductivity,
        WallClass::HighConductivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WallClass::FreeSpace => "free-space",
            WallClass::LowConductivity => "low",
            WallClass::MediumConductivity => "medium",
            WallClass::HighConductivity => "high",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.name() == s)
    }

    pub(crate) fn tag(self) -> u8 {
        self as u8
    }

    pub(crate) fn from_tag(t: u8) -> Option<Self> {
        Self::ALL.get(t as usize).copied()
    }

    /// Mean wall conductivity in S/m used by [`ChannelModel::wall`].
    pub fn default_conductivity(self) -> f64 {
        match self {
            WallClass::FreeSpace => 0.0,
            WallClass::LowConductivity => 0.05,
            WallClass::MediumConductivity => 100.0,
            WallClass::HighConductivity => 1e5,
        }
    }
}

/// Parametric multipath surrogate for the through-wall channel.
///
/// A low-conductivity wall sits between radar and target: the one-way
/// response is the slab transmission (direct pass plus `ringing_taps`
/// internal reverberations, each delayed by `2·thickness·√ε_r/c`).
/// Medium and high conductivity walls block the direct path; the target is
/// seen through `image_reflections` lateral walls whose reflection
/// coefficient grows with σ. Each realization η draws ε_r, σ, wall offsets
/// and tap gains with the given relative spread.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub wall: WallClass,
    pub permittivity: f64,
    pub conductivity: f64,
    pub spread: f64,
    pub thickness: f64,
    pub ringing_taps: usize,
    pub image_reflections: usize,
    /// Distance of the first lateral wall from the radar boresight; later
    /// walls are one metre further out each.
    pub lateral_offset: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl ChannelModel {
    pub fn free_space() -> Self {
        Self {
            wall: WallClass::FreeSpace,
            permittivity: 1.0,
            conductivity: 0.0,
            spread: 0.0,
            thickness: 0.0,
            ringing_taps: 0,
            image_reflections: 0,
            lateral_offset: 1.5,
            realizations: 1,
            seed: 0,
        }
    }

    pub fn wall(class: WallClass) -> Self {
        if class == WallClass::FreeSpace {
            return Self::free_space();
        }
        let low = class == WallClass::LowConductivity;
        Self {
            wall: class,
            permittivity: 4.0,
            conductivity: class.default_conductivity(),
            spread: 0.3,
            thickness: 0.2,
            ringing_taps: if low { 4 } else { 0 },
            image_reflections: if low { 0 } else { 2 },
            lateral_offset: 1.5,
            realizations: 4,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return invalid("channel needs at least one realization");
        }
        if self.wall == WallClass::FreeSpace {
            return Ok(());
        }
        if !(self.permittivity >= 1.0 && self.permittivity.is_finite()) {
            return invalid(format!("relative permittivity {} must be >= 1", self.permittivity));
        }
        if !(self.conductivity >= 0.0 && self.conductivity.is_finite()) {
            return invalid(format!("conductivity {} must be >= 0", self.conductivity));
        }
        if !(0.0..1.0).contains(&self.spread) {
            return invalid(format!("spread {} must be in [0, 1)", self.spread));
        }
        if !(self.thickness > 0.0 && self.thickness.is_finite()) {
            return invalid("wall thickness must be positive");
        }
        if !(self.lateral_offset > 0.0 && self.lateral_offset.is_finite()) {
            return invalid("lateral wall offset must be positive");
        }
        Ok(())
    }

    /// Draws realization `eta` (1-based).
    pub fn realization(&self, eta: usize) -> Result<ChannelRealization> {
        self.validate()?;
        if eta == 0 || eta > self.realizations {
            return invalid(format!("realization {eta} outside 1..={}", self.realizations));
        }
        if self.wall == WallClass::FreeSpace {
            return Ok(ChannelRealization::free_space());
        }
        let mut rng = substream(self.seed, &[0xC4A7, self.wall.tag() as u64, eta as u64]);
        let s = self.spread;
        let mut jitter = |floor: f64| -> f64 {
            let z: f64 = rng.sample(StandardNormal);
            (1.0 + s * z).max(floor)
        };
        let permittivity = (self.permittivity * jitter(0.0)).max(1.0);
        let conductivity = self.conductivity * jitter(0.0);
        let tap_gains = (0..=self.ringing_taps).map(|_| jitter(0.0)).collect();
        let images = (0..self.image_reflections)
            .map(|l| ImageWall {
                offset: (self.lateral_offset + l as f64) * jitter(0.2),
                gain: jitter(0.0),
            })
            .collect();
        Ok(ChannelRealization {
            wall: self.wall,
            permittivity,
            conductivity,
            thickness: self.thickness,
            tap_gains,
            images,
        })
    }
}

/// A lateral wall producing an image of the target at ground range
/// `√(ρ² + (2·offset)²)`; `gain` scales its reflection coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageWall {
    pub offset: f64,
    pub gain: f64,
}

/// One stochastic draw of a [`ChannelModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub wall: WallClass,
    pub permittivity: f64,
    pub conductivity: f64,
    pub thickness: f64,
    /// Multipliers for the direct pass (index 0) and each ringing tap.
    /// Empty means no through-wall path.
    pub tap_gains: Vec<f64>,
    pub images: Vec<ImageWall>,
}

impl ChannelRealization {
    pub fn free_space() -> Self {
        Self {
            wall: WallClass::FreeSpace,
            permittivity: 1.0,
            conductivity: 0.0,
            thickness: 0.0,
            tap_gains: Vec::new(),
            images: Vec::new(),
        }
    }

    /// Range-independent factors at frequency `f`.
    pub fn at_frequency(&self, f: f64) -> Result<FrequencyResponse> {
        if !(f > 0.0 && f.is_finite()) {
            return domain(format!("frequency {f} must be positive"));
        }
        let k0 = 2.0 * std::f64::consts::PI * f / SPEED_OF_LIGHT;
        if self.wall == WallClass::FreeSpace {
            return Ok(FrequencyResponse {
                k0,
                through: Complex64::new(1.0, 0.0),
                images: Vec::new(),
            });
        }
        let omega = 2.0 * std::f64::consts::PI * f;
        let eps = Complex64::new(self.permittivity, -self.conductivity / (omega * VACUUM_PERMITTIVITY));
        let n = eps.sqrt();
        let gamma = (1.0 - n) / (1.0 + n);
        let mut through = Complex64::new(0.0, 0.0);
        if let Some((&g0, rest)) = self.tap_gains.split_first() {
            // one pass through the slab relative to the same length of air
            let pass = (Complex64::new(0.0, -k0 * self.thickness) * (n - 1.0)).exp();
            let bounce = gamma * gamma * (Complex64::new(0.0, -2.0 * k0 * self.thickness) * n).exp();
            let base = (1.0 - gamma * gamma) * pass;
            through = base * g0;
            let mut term = base;
            for &g in rest {
                term *= bounce;
                through += term * g;
            }
        }
        let images = self.images.iter().map(|w| (w.offset, gamma * w.gain)).collect();
        Ok(FrequencyResponse { k0, through, images })
    }

    pub fn response(&self, rho: f64, f: f64) -> Result<Complex64> {
        self.at_frequency(f)?.at(rho)
    }
}

/// Channel response at one frequency as a function of ground range.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    k0: f64,
    through: Complex64,
    images: Vec<(f64, Complex64)>,
}

impl FrequencyResponse {
    pub fn at(&self, rho: f64) -> Result<Complex64> {
        if !(rho > 0.0 && rho.is_finite()) {
            return domain(format!("ground range {rho} must be positive"));
        }
        let mut h = self.through * cylindrical(self.k0, rho);
        for &(offset, g) in &self.images {
            let path = rho.hypot(2.0 * offset);
            h += g * cylindrical(self.k0, path);
        }
        Ok(h)
    }
}

fn cylindrical(k0: f64, rho: f64) -> Complex64 {
    Complex64::from_polar(1.0 / rho.sqrt(), -k0 * rho)
}

/// `H(ρ, f, η)` for realization `eta` (1-based) of `channel`.
pub fn channel_response(channel: &ChannelModel, rho: f64, f: f64, eta: usize) -> Result<Complex64> {
    channel.realization(eta)?.response(rho, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_space_closed_forms() {
        let fs = ChannelModel::free_space();
        let f = 3.0 * SPEED_OF_LIGHT;
        let h = channel_response(&fs, 1.0, f, 1).unwrap();
        assert!((h - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        let h = channel_response(&fs, 4.0, 2.4e9, 1).unwrap();
        assert!((h.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_image_matches_hand_formula() {
        let mut ch = ChannelModel::wall(WallClass::HighConductivity);
        ch.image_reflections = 1;
        ch.spread = 0.0;
        let real = ch.realization(1).unwrap();
        let (f, rho) = (2.4e9, 3.0);
        let eps = Complex64::new(4.0, -1e5 / (2.0 * std::f64::consts::PI * f * VACUUM_PERMITTIVITY));
        let g = ((1.0 - eps.sqrt()) / (1.0 + eps.sqrt())).norm();
        let path = (rho * rho + 9.0f64).sqrt();
        let h = real.response(rho, f).unwrap();
        assert!((h.norm() - g / path.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lossy_walls_block_the_direct_path() {
        for class in [WallClass::MediumConductivity, WallClass::HighConductivity] {
            let mut ch = ChannelModel::wall(class);
            ch.image_reflections = 0;
            ch.ringing_taps = 0;
            let mut real = ch.realization(1).unwrap();
            real.tap_gains = vec![1.0];
            assert!(real.response(3.0, 2.4e9).unwrap().norm() < 1e-20, "{class:?}");
        }
        let low = ChannelModel::wall(WallClass::LowConductivity).realization(1).unwrap();
        let h = low.response(3.0, 2.4e9).unwrap().norm() * 3f64.sqrt();
        assert!(h > 0.05 && h < 1.0, "{h}");
    }

    #[test]
    fn realizations_are_seeded_and_distinct() {
        let ch = ChannelModel::wall(WallClass::LowConductivity);
        assert_eq!(ch.realization(2).unwrap(), ch.realization(2).unwrap());
        assert_ne!(ch.realization(1).unwrap(), ch.realization(2).unwrap());
        assert!(ch.realization(0).is_err());
        assert!(ch.realization(5).is_err());
        assert!(channel_response(&ch, 0.0, 2.4e9, 1).is_err());
    }
}
