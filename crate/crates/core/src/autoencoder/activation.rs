use nalgebra::DMatrix;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    Linear,
    Tanh,
    Sigmoid,
}

/// Elementwise activation `φ` and its inverse `φ⁻¹`.
///
/// For the saturating kinds the inverse is evaluated on values clamped into
/// `(lo + clamp, hi − clamp)`, so it is finite everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Activation {
    pub kind: ActivationKind,
    pub clamp: f64,
}

impl Default for Activation {
    fn default() -> Self {
        Self::linear()
    }
}

impl Activation {
    pub const DEFAULT_CLAMP: f64 = 1e-6;

    pub fn linear() -> Self {
        Self {
            kind: ActivationKind::Linear,
            clamp: Self::DEFAULT_CLAMP,
        }
    }

    pub fn tanh() -> Self {
        Self {
            kind: ActivationKind::Tanh,
            clamp: Self::DEFAULT_CLAMP,
        }
    }

    pub fn sigmoid() -> Self {
        Self {
            kind: ActivationKind::Sigmoid,
            clamp: Self::DEFAULT_CLAMP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.clamp > 0.0 && self.clamp < 0.1 {
            Ok(())
        } else {
            invalid(format!("activation clamp must lie in (0, 0.1), got {}", self.clamp))
        }
    }

    pub fn is_linear(&self) -> bool {
        self.kind == ActivationKind::Linear
    }

    #[inline]
    pub fn forward(&self, v: f64) -> f64 {
        match self.kind {
            ActivationKind::Linear => v,
            ActivationKind::Tanh => v.tanh(),
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-v).exp()),
        }
    }

    #[inline]
    pub fn inverse(&self, v: f64) -> f64 {
        match self.kind {
            ActivationKind::Linear => v,
            ActivationKind::Tanh => v.clamp(-1.0 + self.clamp, 1.0 - self.clamp).atanh(),
            ActivationKind::Sigmoid => {
                let p = v.clamp(self.clamp, 1.0 - self.clamp);
                (p / (1.0 - p)).ln()
            }
        }
    }

    pub fn apply(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self.kind {
            ActivationKind::Linear => m.clone(),
            _ => m.map(|v| self.forward(v)),
        }
    }

    pub fn apply_in_place(&self, m: &mut DMatrix<f64>) {
        if !self.is_linear() {
            m.iter_mut().for_each(|v| *v = self.forward(*v));
        }
    }

    pub fn invert(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self.kind {
            ActivationKind::Linear => m.clone(),
            _ => m.map(|v| self.inverse(v)),
        }
    }

    pub(crate) fn tag(&self) -> u8 {
        match self.kind {
            ActivationKind::Linear => 0,
            ActivationKind::Tanh => 1,
            ActivationKind::Sigmoid => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Self::linear()),
            1 => Some(Self::tanh()),
            2 => Some(Self::sigmoid()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_is_identity_both_ways() {
        let m = DMatrix::from_row_slice(2, 2, &[-3.0, 0.5, 7.0, 1e9]);
        let a = Activation::linear();
        assert_eq!(a.apply(&m), m);
        assert_eq!(a.invert(&m), m);
    }

    #[test]
    fn tanh_round_trip() {
        let a = Activation::tanh();
        for i in 0..=60 {
            let v = -3.0 + 0.1 * i as f64;
            assert!((a.inverse(a.forward(v)) - v).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn sigmoid_round_trip() {
        let a = Activation::sigmoid();
        for v in [-4.0, -1.0, 0.0, 0.3, 2.5] {
            assert!((a.inverse(a.forward(v)) - v).abs() < 1e-9);
        }
    }

    #[test]
    fn tanh_inverse_clamps_at_one() {
        let a = Activation::tanh();
        let at_one = a.inverse(1.0);
        assert!(at_one.is_finite());
        assert_eq!(at_one, (1.0 - a.clamp).atanh());
        assert_eq!(a.inverse(5.0), at_one);
    }

    #[test]
    fn clamp_range_validated() {
        assert!(Activation { clamp: 0.0, ..Activation::tanh() }.validate().is_err());
        assert!(Activation { clamp: 0.1, ..Activation::tanh() }.validate().is_err());
        assert!(Activation::tanh().validate().is_ok());
    }
}
