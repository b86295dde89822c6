use crate::error::{invalid, Result};

/// Parametric walking human: a torso translating along a straight line plus
/// two arms and two legs swinging sinusoidally along the heading.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitParams {
    /// Torso speed in m/s.
    pub speed: f64,
    /// Torso ground position `(x, z)` at `t = 0`.
    pub start: [f64; 2],
    /// Walking direction in the ground plane, radians from the +x axis.
    pub heading: f64,
    pub stride_frequency: f64,
    pub arm_swing: f64,
    pub leg_swing: f64,
    pub torso_height: f64,
    pub arm_height: f64,
    pub leg_height: f64,
    /// Half the lateral distance between the left and right limbs.
    pub half_width: f64,
    /// Reflectivities of torso, left leg, right leg, left arm, right arm.
    pub reflectivity: [f64; 5],
}

impl Default for GaitParams {
    fn default() -> Self {
        Self {
            speed: 1.0,
            start: [-2.5, 3.0],
            heading: 0.0,
            stride_frequency: 2.0,
            arm_swing: 0.3,
            leg_swing: 0.25,
            torso_height: 1.0,
            arm_height: 1.3,
            leg_height: 0.5,
            half_width: 0.15,
            reflectivity: [1.0, 0.5, 0.5, 0.3, 0.3],
        }
    }
}

impl GaitParams {
    /// A motionless torso with no limb movement.
    pub fn stationary(x: f64, z: f64) -> Self {
        Self {
            speed: 0.0,
            start: [x, z],
            arm_swing: 0.0,
            leg_swing: 0.0,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.speed,
            self.heading,
            self.stride_frequency,
            self.arm_swing,
            self.leg_swing,
            self.torso_height,
            self.arm_height,
            self.leg_height,
            self.half_width,
            self.start[0],
            self.start[1],
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return invalid("gait parameters must be finite");
        }
        if self.speed < 0.0 {
            return invalid(format!("gait speed {} must not be negative", self.speed));
        }
        if self.reflectivity.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return invalid("reflectivities must be positive");
        }
        Ok(())
    }
}

/// Radar phase centre: ground position `(x, z)` and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarPosition {
    pub x: f64,
    pub z: f64,
    pub height: f64,
}

impl Default for RadarPosition {
    fn default() -> Self {
        Self {
            x: 0.5,
            z: 0.0,
            height: 0.0,
        }
    }
}

/// Sampled ranges of `B` point scatterers on the grid `t_k = k / sample_rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererTrack {
    sample_rate: f64,
    reflectivity: Vec<f64>,
    /// 3-D range per scatterer and sample.
    range: Vec<Vec<f64>>,
    /// Ground-plane range per scatterer and sample.
    ground_range: Vec<Vec<f64>>,
}

impl ScattererTrack {
    pub fn new(
        sample_rate: f64,
        reflectivity: Vec<f64>,
        range: Vec<Vec<f64>>,
        ground_range: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return invalid("sample rate must be positive");
        }
        if reflectivity.is_empty() || range.len() != reflectivity.len() || ground_range.len() != reflectivity.len() {
            return invalid("one reflectivity and one range series per scatterer required");
        }
        if reflectivity.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return invalid("reflectivities must be positive");
        }
        let n = range[0].len();
        for (r, g) in range.iter().zip(&ground_range) {
            if r.len() != n || g.len() != n {
                return invalid("range series differ in length");
            }
            // tolerate rounding when the scatterer is level with the radar
            if r.iter().zip(g).any(|(&r, &g)| !(g >= 0.0 && r >= g * (1.0 - 1e-12) && r.is_finite())) {
                return invalid("ranges must satisfy r >= rho >= 0");
            }
        }
        Ok(Self {
            sample_rate,
            reflectivity,
            range,
            ground_range,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> usize {
        self.range[0].len()
    }

    pub fn scatterers(&self) -> usize {
        self.reflectivity.len()
    }

    pub fn reflectivity(&self) -> &[f64] {
        &self.reflectivity
    }

    pub fn range(&self, b: usize) -> &[f64] {
        &self.range[b]
    }

    pub fn ground_range(&self, b: usize) -> &[f64] {
        &self.ground_range[b]
    }

    /// Keeps only the listed scatterers.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        if idx.iter().any(|&b| b >= self.scatterers()) {
            return invalid("scatterer index out of range");
        }
        Self::new(
            self.sample_rate,
            idx.iter().map(|&b| self.reflectivity[b]).collect(),
            idx.iter().map(|&b| self.range[b].clone()).collect(),
            idx.iter().map(|&b| self.ground_range[b].clone()).collect(),
        )
    }

    /// Union of two tracks on the same time grid.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.sample_rate != other.sample_rate || self.samples() != other.samples() {
            return invalid("tracks sampled on different grids");
        }
        let mut out = self.clone();
        out.reflectivity.extend_from_slice(&other.reflectivity);
        out.range.extend(other.range.iter().cloned());
        out.ground_range.extend(other.ground_range.iter().cloned());
        Ok(out)
    }
}

/// Samples the five-scatterer walker over `[0, duration)`.
pub fn gait_trajectory(
    gait: &GaitParams,
    radar: &RadarPosition,
    duration: f64,
    sample_rate: f64,
) -> Result<ScattererTrack> {
    if !(duration > 0.0 && duration.is_finite()) {
        return invalid(format!("duration {duration} must be positive"));
    }
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return invalid(format!("sample rate {sample_rate} must be positive"));
    }
    gait.validate()?;
    let n = (duration * sample_rate).round() as usize;
    if n == 0 {
        return invalid("duration shorter than one sample");
    }
    let (hs, hc) = gait.heading.sin_cos();
    // (along-heading swing, lateral side, height) for each scatterer
    let parts: [(f64, f64, f64); 5] = [
        (0.0, 0.0, gait.torso_height),
        (gait.leg_swing, 1.0, gait.leg_height),
        (-gait.leg_swing, -1.0, gait.leg_height),
        (-gait.arm_swing, 1.0, gait.arm_height),
        (gait.arm_swing, -1.0, gait.arm_height),
    ];
    let mut range: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(n)).collect();
    let mut ground: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(n)).collect();
    for k in 0..n {
        let t = k as f64 / sample_rate;
        let along = gait.speed * t;
        let phase = (2.0 * std::f64::consts::PI * gait.stride_frequency * t).sin();
        for (b, &(swing, side, height)) in parts.iter().enumerate() {
            let s = along + swing * phase;
            let x = gait.start[0] + s * hc - side * gait.half_width * hs;
            let z = gait.start[1] + s * hs + side * gait.half_width * hc;
            let rho = (x - radar.x).hypot(z - radar.z);
            ground[b].push(rho);
            range[b].push(rho.hypot(height - radar.height));
        }
    }
    ScattererTrack::new(sample_rate, gait.reflectivity.to_vec(), range, ground)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_geometry() {
        let g = GaitParams::stationary(0.5, 3.0);
        let tr = gait_trajectory(&g, &RadarPosition::default(), 1.0, 100.0).unwrap();
        assert_eq!(tr.scatterers(), 5);
        assert_eq!(tr.samples(), 100);
        for &r in tr.range(0) {
            assert!((r - 10f64.sqrt()).abs() < 1e-12);
        }
        for &rho in tr.ground_range(0) {
            assert!((rho - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tangential_pass_is_symmetric_about_closest_approach() {
        let g = GaitParams {
            arm_swing: 0.0,
            leg_swing: 0.0,
            ..GaitParams::default()
        };
        let tr = gait_trajectory(&g, &RadarPosition::default(), 6.0, 500.0).unwrap();
        let rho = tr.ground_range(0);
        let (imin, min) = rho
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
        assert_eq!(imin, 1500);
        assert!((min - 3.0).abs() < 1e-12);
        for k in 1..1500 {
            assert!((rho[1500 - k] - rho[1500 + k]).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = GaitParams::default();
        let r = RadarPosition::default();
        assert!(gait_trajectory(&g, &r, 0.0, 500.0).is_err());
        assert!(gait_trajectory(&g, &r, 6.0, -1.0).is_err());
        let neg = GaitParams {
            speed: -1.0,
            ..g.clone()
        };
        assert!(gait_trajectory(&neg, &r, 6.0, 500.0).is_err());
    }
}
