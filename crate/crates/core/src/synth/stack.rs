use nalgebra::DMatrix;

use super::{SignatureKind, WallClass};
use crate::error::{invalid, Result};

/// Provenance of one image column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnMeta {
    pub interval: u16,
    pub realization: u16,
    pub wall: WallClass,
}

/// `P×Q` matrix of `Q` vectorised images of `rows × cols = P` pixels.
///
/// Images are vectorised column-major: pixel `(r, c)` sits at `r + c·rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageStack {
    data: DMatrix<f64>,
    rows: usize,
    cols: usize,
    kind: SignatureKind,
    columns: Vec<ColumnMeta>,
}

impl ImageStack {
    pub fn new(
        data: DMatrix<f64>,
        rows: usize,
        cols: usize,
        kind: SignatureKind,
        columns: Vec<ColumnMeta>,
    ) -> Result<Self> {
        if rows * cols != data.nrows() {
            return invalid(format!(
                "image shape {rows}x{cols} does not match {} pixels",
                data.nrows()
            ));
        }
        if columns.len() != data.ncols() {
            return invalid(format!(
                "{} column records for {} images",
                columns.len(),
                data.ncols()
            ));
        }
        Ok(Self {
            data,
            rows,
            cols,
            kind,
            columns,
        })
    }

    /// Builds a stack from equally shaped images.
    pub fn from_images(images: &[DMatrix<f64>], kind: SignatureKind, columns: Vec<ColumnMeta>) -> Result<Self> {
        let Some(first) = images.first() else {
            return invalid("no images");
        };
        let (rows, cols) = first.shape();
        if images.iter().any(|m| m.shape() != (rows, cols)) {
            return invalid("images differ in shape");
        }
        let p = rows * cols;
        let mut data = DMatrix::zeros(p, images.len());
        for (j, img) in images.iter().enumerate() {
            data.column_mut(j).copy_from_slice(img.as_slice());
        }
        Self::new(data, rows, cols, kind, columns)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    /// Same metadata with new pixel values.
    pub fn with_data(&self, data: DMatrix<f64>) -> Result<Self> {
        if data.shape() != self.data.shape() {
            return invalid("replacement data has a different shape");
        }
        Ok(Self {
            data,
            ..self.clone_meta()
        })
    }

    fn clone_meta(&self) -> Self {
        Self {
            data: DMatrix::zeros(0, 0),
            rows: self.rows,
            cols: self.cols,
            kind: self.kind,
            columns: self.columns.clone(),
        }
    }

    pub fn pixels(&self) -> usize {
        self.data.nrows()
    }

    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    pub fn image_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn kind(&self) -> SignatureKind {
        self.kind
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    /// Column `j` reshaped to `rows × cols`.
    pub fn image(&self, j: usize) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.rows, self.cols, self.data.column(j).as_slice())
    }

    /// New stack holding the listed columns in order.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.len()) {
            return invalid(format!("column {bad} out of range"));
        }
        let data = self.data.select_columns(idx);
        let columns = idx.iter().map(|&j| self.columns[j]).collect();
        Self::new(data, self.rows, self.cols, self.kind, columns)
    }

    /// True when every entry is finite and within `[0, 1]`.
    pub fn is_normalized(&self) -> bool {
        self.data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(n: usize) -> Vec<ColumnMeta> {
        (0..n)
            .map(|i| ColumnMeta {
                interval: i as u16,
                realization: 1,
                wall: WallClass::FreeSpace,
            })
            .collect()
    }

    #[test]
    fn images_round_trip_through_columns() {
        let a = DMatrix::from_fn(3, 2, |r, c| (r * 2 + c) as f64 / 10.0);
        let b = a.map(|v| 1.0 - v);
        let s = ImageStack::from_images(&[a.clone(), b.clone()], SignatureKind::Frontal, meta(2)).unwrap();
        assert_eq!(s.pixels(), 6);
        assert_eq!(s.image(0), a);
        assert_eq!(s.image(1), b);
        let sel = s.select(&[1]).unwrap();
        assert_eq!(sel.image(0), b);
        assert_eq!(sel.columns()[0].interval, 1);
        assert!(s.is_normalized());
    }

    #[test]
    fn shape_checks() {
        assert!(ImageStack::new(DMatrix::zeros(6, 2), 4, 2, SignatureKind::Generic, meta(2)).is_err());
        assert!(ImageStack::new(DMatrix::zeros(6, 2), 3, 2, SignatureKind::Generic, meta(3)).is_err());
    }
}
