use std::io::{Read, Write};

use nalgebra::DMatrix;

use super::Activation;
use crate::error::{invalid, Error, Result};
use crate::solvers::gemm;

const MAGIC: &[u8; 6] = b"RDAEW1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Dae,
    SparseDae,
    StackedSdae,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Dae => "DAE",
            Variant::SparseDae => "SparseDAE",
            Variant::StackedSdae => "StackedSDAE",
        }
    }

    pub fn is_stacked(&self) -> bool {
        matches!(self, Variant::StackedSdae)
    }

    fn tag(&self) -> u8 {
        match self {
            Variant::Dae => 0,
            Variant::SparseDae => 1,
            Variant::StackedSdae => 2,
        }
    }

    fn from_tag(t: u8) -> Option<Self> {
        match t {
            0 => Some(Variant::Dae),
            1 => Some(Variant::SparseDae),
            2 => Some(Variant::StackedSdae),
            _ => None,
        }
    }
}

/// Learned matrices of an autoencoder, in forward order.
///
/// Shallow variants hold `[W1 (l×P), W2 (P×l)]`; the stacked variant holds
/// `[W11 (l0×P), W12 (l1×l0), W21 (l2×l1), W22 (P×l2)]`. The activation is
/// applied after every matrix except the last.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderWeights {
    variant: Variant,
    activation: Activation,
    layers: Vec<DMatrix<f64>>,
}

impl AutoencoderWeights {
    pub fn new(variant: Variant, activation: Activation, layers: Vec<DMatrix<f64>>) -> Result<Self> {
        let expected = if variant.is_stacked() { 4 } else { 2 };
        if layers.len() != expected {
            return invalid(format!(
                "{} needs {expected} weight matrices, got {}",
                variant.name(),
                layers.len()
            ));
        }
        let pixels = layers[0].ncols();
        for w in layers.windows(2) {
            if w[1].ncols() != w[0].nrows() {
                return invalid("weight matrices do not chain");
            }
        }
        if layers.last().map(|w| w.nrows()) != Some(pixels) {
            return invalid("decoder output size differs from encoder input size");
        }
        if variant.is_stacked() {
            let (l0, l1, l2) = (layers[0].nrows(), layers[1].nrows(), layers[2].nrows());
            if !(l0 > l1 && l1 > l2) {
                return invalid(format!("stacked layer sizes must strictly decrease, got ({l0}, {l1}, {l2})"));
            }
        }
        if layers.iter().any(|w| w.iter().any(|v| !v.is_finite())) {
            return crate::error::domain("weights contain non-finite entries");
        }
        Ok(Self {
            variant,
            activation,
            layers,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layers(&self) -> &[DMatrix<f64>] {
        &self.layers
    }

    pub fn pixels(&self) -> usize {
        self.layers[0].ncols()
    }

    /// `[P, l]` or `[P, l0, l1, l2]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.pixels())
            .chain(self.layers[..self.layers.len() - 1].iter().map(|w| w.nrows()))
            .collect()
    }

    /// Multiply-accumulate count of one inference pass on a single image.
    pub fn inference_macs(&self) -> usize {
        self.layers.iter().map(|w| w.nrows() * w.ncols()).sum()
    }
}

/// Denoises each column of `x_hat`: `W2 φ(W1 x̂)` or
/// `W22 φ(W21 φ(W12 φ(W11 x̂)))`, clamped to `[0, 1]`.
pub fn infer(weights: &AutoencoderWeights, x_hat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x_hat.nrows() != weights.pixels() {
        return invalid(format!(
            "input has {} pixels, weights expect {}",
            x_hat.nrows(),
            weights.pixels()
        ));
    }
    let (last, hidden) = weights.layers.split_last().expect("at least two layers");
    let mut h = x_hat.clone();
    for w in hidden {
        h = gemm(w, &h);
        weights.activation.apply_in_place(&mut h);
    }
    let mut out = gemm(last, &h);
    out.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    Ok(out)
}

/// Serialises weights: magic `RDAEW1`, variant tag, activation tag, `u32`
/// layer-size count and sizes, then each matrix as little-endian `f64`
/// column-major.
pub fn write_weights(weights: &AutoencoderWeights, mut w: impl Write) -> Result<()> {
    let sizes = weights.layer_sizes();
    let mut buf = Vec::with_capacity(16 + 8 * weights.inference_macs());
    buf.extend_from_slice(MAGIC);
    buf.push(weights.variant.tag());
    buf.push(weights.activation.tag());
    buf.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
    for s in &sizes {
        buf.extend_from_slice(&(*s as u32).to_le_bytes());
    }
    for m in &weights.layers {
        for v in m.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_weights(mut r: impl Read) -> Result<AutoencoderWeights> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut cur = crate::synth::io::Cursor::new(&bytes);
    if cur.take(6)? != MAGIC {
        return Err(Error::Format("bad weights magic".into()));
    }
    let variant = Variant::from_tag(cur.u8()?).ok_or_else(|| Error::Format("unknown variant tag".into()))?;
    let activation =
        Activation::from_tag(cur.u8()?).ok_or_else(|| Error::Format("unknown activation tag".into()))?;
    let n = cur.u32()? as usize;
    let expected = if variant.is_stacked() { 4 } else { 2 };
    if n != expected {
        return Err(Error::Format(format!("{} expects {expected} layer sizes, file has {n}", variant.name())));
    }
    let sizes: Vec<usize> = (0..n).map(|_| cur.u32().map(|v| v as usize)).collect::<Result<_>>()?;
    let mut layers = Vec::with_capacity(n);
    for k in 0..n {
        let cols = sizes[k];
        let rows = if k + 1 < n { sizes[k + 1] } else { sizes[0] };
        let data = cur.f64s(rows * cols)?;
        layers.push(DMatrix::from_vec(rows, cols, data));
    }
    if !cur.is_empty() {
        return Err(Error::Format("trailing bytes after weights".into()));
    }
    AutoencoderWeights::new(variant, activation, layers).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shallow(w1: DMatrix<f64>, w2: DMatrix<f64>) -> AutoencoderWeights {
        AutoencoderWeights::new(Variant::Dae, Activation::linear(), vec![w1, w2]).unwrap()
    }

    #[test]
    fn identity_composition_passes_input_through() {
        let p = 5;
        let w = shallow(DMatrix::identity(p, p), DMatrix::identity(p, p));
        let x = DMatrix::from_fn(p, 3, |i, j| ((i + 2 * j) % 4) as f64 / 4.0 + 0.1);
        assert_eq!(infer(&w, &x).unwrap(), x);
        // values outside [0, 1] are clamped
        let y = DMatrix::from_element(p, 1, 1.5);
        assert!(infer(&w, &y).unwrap().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn zero_weights_give_zero() {
        let w = shallow(DMatrix::zeros(2, 4), DMatrix::zeros(4, 2));
        assert!(infer(&w, &DMatrix::from_element(4, 2, 0.7)).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn batch_equals_columnwise() {
        let w1 = DMatrix::from_fn(3, 6, |i, j| ((i * 5 + j) % 7) as f64 * 0.1 - 0.3);
        let w2 = DMatrix::from_fn(6, 3, |i, j| ((i + j * 3) % 5) as f64 * 0.2 - 0.4);
        let w = AutoencoderWeights::new(Variant::SparseDae, Activation::tanh(), vec![w1, w2]).unwrap();
        let x = DMatrix::from_fn(6, 4, |i, j| ((i * j) % 3) as f64 * 0.4);
        let batch = infer(&w, &x).unwrap();
        for j in 0..4 {
            let single = infer(&w, &x.columns(j, 1).into_owned()).unwrap();
            assert_eq!(single.as_slice(), batch.column(j).as_slice());
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let w = shallow(DMatrix::zeros(2, 4), DMatrix::zeros(4, 2));
        assert!(matches!(infer(&w, &DMatrix::zeros(5, 1)), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn stacked_sizes_must_decrease() {
        let layers = vec![
            DMatrix::zeros(4, 8),
            DMatrix::zeros(4, 4),
            DMatrix::zeros(2, 4),
            DMatrix::zeros(8, 2),
        ];
        assert!(AutoencoderWeights::new(Variant::StackedSdae, Activation::linear(), layers).is_err());
    }

    #[test]
    fn file_round_trip_and_truncation() {
        let layers = vec![
            DMatrix::from_fn(4, 9, |i, j| (i * 9 + j) as f64 * 0.37 - 1.0),
            DMatrix::from_fn(3, 4, |i, j| (i + j) as f64 * -0.11),
            DMatrix::from_fn(2, 3, |i, j| (i * j) as f64 + 0.5),
            DMatrix::from_fn(9, 2, |i, j| i as f64 - j as f64 * 1e-7),
        ];
        let w = AutoencoderWeights::new(Variant::StackedSdae, Activation::sigmoid(), layers).unwrap();
        let mut buf = Vec::new();
        write_weights(&w, &mut buf).unwrap();
        assert_eq!(&buf[..6], b"RDAEW1");
        let back = read_weights(&buf[..]).unwrap();
        assert_eq!(back, w);
        assert!(matches!(read_weights(&buf[..buf.len() - 3]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_weights(&bad[..]), Err(Error::Format(_))));
    }
}
