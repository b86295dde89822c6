use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ChannelModel, ScattererTrack};
use crate::error::{invalid, Result};

/// Monostatic stepped-frequency radar. `bandwidth = 0` is a single-tone
/// (narrowband) radar.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarConfig {
    pub carrier: f64,
    pub bandwidth: f64,
    pub frequency_samples: usize,
    pub sample_rate: f64,
    pub duration: f64,
    /// Amplitude calibration applied to every return.
    pub amplitude: f64,
    /// Antenna gain offset in dB applied on top of `amplitude`.
    pub gain_offset_db: f64,
    /// STFT window length in seconds.
    pub window: f64,
}

impl RadarConfig {
    pub fn narrowband(carrier: f64) -> Self {
        Self {
            carrier,
            bandwidth: 0.0,
            frequency_samples: 1,
            sample_rate: 500.0,
            duration: 6.0,
            amplitude: 0.2,
            gain_offset_db: 0.0,
            window: 0.1,
        }
    }

    /// 2 GHz of bandwidth in 133 steps (about 10 m unambiguous range).
    pub fn wideband(carrier: f64) -> Self {
        Self {
            bandwidth: 2e9,
            frequency_samples: 133,
            ..Self::narrowband(carrier)
        }
    }

    pub fn is_narrowband(&self) -> bool {
        self.bandwidth == 0.0
    }

    pub fn time_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier > 0.0 && self.carrier.is_finite()) {
            return invalid("carrier must be positive");
        }
        if !(self.bandwidth >= 0.0 && self.bandwidth < 2.0 * self.carrier) {
            return invalid("bandwidth must be in [0, 2*carrier)");
        }
        if self.frequency_samples == 0 || (self.is_narrowband() && self.frequency_samples != 1) {
            return invalid("narrowband radar uses one frequency sample; wideband at least one");
        }
        if !(self.sample_rate > 0.0 && self.duration > 0.0 && self.sample_rate.is_finite() && self.duration.is_finite()) {
            return invalid("sample rate and duration must be positive");
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return invalid("amplitude must be positive");
        }
        if !self.gain_offset_db.is_finite() {
            return invalid("gain offset must be finite");
        }
        if !(self.window > 0.0 && self.window <= self.duration) {
            return invalid("window must be positive and no longer than the duration");
        }
        Ok(())
    }

    /// `f_c − β/2 + k·β/n` for `k < n`; just the carrier when narrowband.
    pub fn frequencies(&self) -> Vec<f64> {
        if self.is_narrowband() {
            return vec![self.carrier];
        }
        let n = self.frequency_samples;
        let step = self.bandwidth / n as f64;
        (0..n)
            .map(|k| self.carrier - self.bandwidth / 2.0 + k as f64 * step)
            .collect()
    }
}

/// Received signal `s_rx(t, f)` (time × frequency) for realization `eta` of
/// `channel`: the sum over scatterers of `A·a_b·H(ρ_b, f)²` with the height
/// correction `exp(−j4πf(r_b − ρ_b)/c)`.
pub fn radar_returns(
    track: &ScattererTrack,
    channel: &ChannelModel,
    radar: &RadarConfig,
    eta: usize,
) -> Result<DMatrix<Complex64>> {
    radar.validate()?;
    if track.sample_rate() != radar.sample_rate || track.samples() != radar.time_samples() {
        return invalid(format!(
            "track has {} samples at {} Hz, radar expects {} at {} Hz",
            track.samples(),
            track.sample_rate(),
            radar.time_samples(),
            radar.sample_rate
        ));
    }
    let real = channel.realization(eta)?;
    let freqs = radar.frequencies();
    let mut out = DMatrix::from_element(track.samples(), freqs.len(), Complex64::new(0.0, 0.0));
    for (fi, &f) in freqs.iter().enumerate() {
        let resp = real.at_frequency(f)?;
        let k2 = 4.0 * std::f64::consts::PI * f / crate::SPEED_OF_LIGHT;
        let mut col = out.column_mut(fi);
        for b in 0..track.scatterers() {
            let gain = radar.amplitude * 10f64.powf(radar.gain_offset_db / 20.0) * track.reflectivity()[b];
            for (t, (&r, &rho)) in track.range(b).iter().zip(track.ground_range(b)).enumerate() {
                let h = resp.at(rho)?;
                col[t] += h * h * gain * Complex64::from_polar(1.0, -k2 * (r - rho));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gait_trajectory, GaitParams, RadarPosition, WallClass};

    fn static_track(n: usize, ranges: &[(f64, f64)]) -> ScattererTrack {
        ScattererTrack::new(
            500.0,
            vec![1.0; ranges.len()],
            ranges.iter().map(|&(r, _)| vec![r; n]).collect(),
            ranges.iter().map(|&(_, g)| vec![g; n]).collect(),
        )
        .unwrap()
    }

    fn radar(amplitude: f64) -> RadarConfig {
        RadarConfig {
            duration: 0.1,
            amplitude,
            window: 0.05,
            ..RadarConfig::narrowband(2.4e9)
        }
    }

    #[test]
    fn unit_static_scatterer() {
        let tr = static_track(50, &[(1.0, 1.0)]);
        let s = radar_returns(&tr, &ChannelModel::free_space(), &radar(1.0), 1).unwrap();
        assert_eq!(s.shape(), (50, 1));
        let want = Complex64::from_polar(1.0, -4.0 * std::f64::consts::PI * 2.4e9 / crate::SPEED_OF_LIGHT);
        for v in s.iter() {
            assert!((v - want).norm() < 1e-9);
        }
        let two = static_track(50, &[(1.0, 1.0), (1.0, 1.0)]);
        let s2 = radar_returns(&two, &ChannelModel::free_space(), &radar(1.0), 1).unwrap();
        assert!((s2[0].norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn returns_are_linear_in_scatterer_sets() {
        let cfg = RadarConfig {
            duration: 1.0,
            ..RadarConfig::wideband(2.4e9)
        };
        let full = gait_trajectory(&GaitParams::default(), &RadarPosition::default(), 1.0, 500.0).unwrap();
        let a = full.subset(&[0, 3]).unwrap();
        let b = full.subset(&[1, 2, 4]).unwrap();
        let ch = ChannelModel::wall(WallClass::HighConductivity);
        let s = radar_returns(&a.merge(&b).unwrap(), &ch, &cfg, 2).unwrap();
        let sum = radar_returns(&a, &ch, &cfg, 2).unwrap() + radar_returns(&b, &ch, &cfg, 2).unwrap();
        let err = (&s - &sum).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let norm = s.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-12 * norm, "{err} vs {norm}");
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let tr = static_track(49, &[(1.0, 1.0)]);
        assert!(radar_returns(&tr, &ChannelModel::free_space(), &radar(1.0), 1).is_err());
    }

    #[test]
    fn frequency_grid() {
        let w = RadarConfig::wideband(2.4e9);
        let f = w.frequencies();
        assert_eq!(f.len(), 133);
        assert!((f[0] - 1.4e9).abs() < 1.0);
        assert!((f[1] - f[0] - 2e9 / 133.0).abs() < 1e-3);
        assert_eq!(RadarConfig::narrowband(5e9).frequencies(), vec![5e9]);
    }
}
