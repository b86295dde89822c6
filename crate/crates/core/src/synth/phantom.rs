use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Layout of the synthetic frontal-image corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomParams {
    pub rows: usize,
    pub cols: usize,
    pub subjects: usize,
    /// Orientations evenly spaced over a full turn.
    pub orientations: usize,
}

impl Default for PhantomParams {
    fn default() -> Self {
        Self {
            rows: 31,
            cols: 31,
            subjects: 5,
            orientations: 90,
        }
    }
}

// (x, y, half-width, half-height, weight) in body units; x lateral, y up
fn body_parts(width: f64, depth: f64, theta: f64) -> [(f64, f64, f64, f64, f64); 6] {
    let (s, c) = theta.sin_cos();
    let torso_w = width * c.abs() + depth * s.abs();
    let facing = 0.55 + 0.45 * c * c;
    let arm_x = (torso_w + 0.12) * c.abs().max(0.25);
    let leg_x = 0.45 * torso_w;
    [
        (0.0, 0.78, 0.11, 0.13, 0.8),
        (0.0, 0.35, torso_w, 0.32, facing),
        (-arm_x, 0.38, 0.07, 0.28, 0.5 * facing),
        (arm_x, 0.38, 0.07, 0.28, 0.5 * facing),
        (-leg_x, -0.42, 0.09, 0.42, 0.65),
        (leg_x, -0.42, 0.09, 0.42, 0.65),
    ]
}

/// Frontal radar image of subject `subject` turned to orientation
/// `orientation`, scaled to a peak of one.
pub fn frontal_phantom(params: &PhantomParams, subject: usize, orientation: usize) -> Result<DMatrix<f64>> {
    if params.rows < 3 || params.cols < 3 {
        return invalid("phantom images need at least 3x3 pixels");
    }
    if subject >= params.subjects || orientation >= params.orientations {
        return invalid(format!(
            "subject {subject} / orientation {orientation} outside {}x{}",
            params.subjects, params.orientations
        ));
    }
    let k = subject as f64;
    let height = 0.85 + 0.04 * k;
    let width = 0.2 + 0.025 * ((subject * 3) % 5) as f64;
    let depth = 0.12 + 0.01 * k;
    let shift = 0.06 * (k - 2.0);
    let theta = std::f64::consts::TAU * orientation as f64 / params.orientations as f64;
    let parts = body_parts(width, depth, theta);
    let mut img = DMatrix::from_fn(params.rows, params.cols, |r, c| {
        // image y grows downwards; map pixels onto [-1, 1]^2
        let y = 1.0 - 2.0 * r as f64 / (params.rows - 1) as f64;
        let x = 2.0 * c as f64 / (params.cols - 1) as f64 - 1.0;
        parts
            .iter()
            .map(|&(px, py, hw, hh, w)| {
                let dx = (x - shift - px) / hw;
                let dy = (y / height - py) / hh;
                w * (-0.5 * (dx * dx + dy * dy)).exp()
            })
            .sum::<f64>()
    });
    let peak = img.max();
    img /= peak;
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn images_are_normalized_and_vary() {
        let p = PhantomParams::default();
        let a = frontal_phantom(&p, 0, 0).unwrap();
        let b = frontal_phantom(&p, 0, 20).unwrap();
        let c = frontal_phantom(&p, 4, 0).unwrap();
        for m in [&a, &b, &c] {
            assert_eq!(m.shape(), (31, 31));
            assert!((m.max() - 1.0).abs() < 1e-12 && m.min() >= 0.0);
        }
        assert!((&a - &b).norm() > 0.5);
        assert!((&a - &c).norm() > 0.5);
        assert!(frontal_phantom(&p, 5, 0).is_err());
    }
}
