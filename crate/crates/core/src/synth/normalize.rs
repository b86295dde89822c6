use nalgebra::DMatrix;

use crate::error::{domain, invalid, Result};

/// Clamp window in dB mapped onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicRange {
    pub floor_db: f64,
    pub ceil_db: f64,
}

impl DynamicRange {
    pub fn new(floor_db: f64, ceil_db: f64) -> Result<Self> {
        let r = Self { floor_db, ceil_db };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        if !(self.floor_db < self.ceil_db) || !self.floor_db.is_finite() || !self.ceil_db.is_finite() {
            return invalid(format!(
                "dB floor {} must be below ceiling {}",
                self.floor_db, self.ceil_db
            ));
        }
        Ok(())
    }
}

/// `10·log10(power)` clamped to the range and mapped affinely to `[0, 1]`.
pub fn to_db_normalize(power: &DMatrix<f64>, range: DynamicRange) -> Result<DMatrix<f64>> {
    range.validate()?;
    if power.iter().any(|p| !(*p >= 0.0)) {
        return domain("power must be non-negative");
    }
    let span = range.ceil_db - range.floor_db;
    Ok(power.map(|p| {
        let db = (10.0 * p.log10()).clamp(range.floor_db, range.ceil_db);
        (db - range.floor_db) / span
    }))
}

/// Mean squared value of the strictly positive (above-floor) entries;
/// zero when there are none.
pub fn signal_reference(data: &DMatrix<f64>) -> f64 {
    let (sum, count) = data
        .iter()
        .filter(|&&v| v > 0.0)
        .fold((0.0, 0usize), |(s, c), &v| (s + v * v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_and_midpoint() {
        let r = DynamicRange::new(-70.0, -20.0).unwrap();
        let p = DMatrix::from_row_slice(1, 4, &[1e-2, 0.0, 10f64.powf(-4.5), 1.0]);
        let n = to_db_normalize(&p, r).unwrap();
        assert!((n[0] - 1.0).abs() < 1e-12);
        assert_eq!(n[1], 0.0);
        assert!((n[2] - 0.5).abs() < 1e-12);
        assert_eq!(n[3], 1.0);
    }

    #[test]
    fn bad_inputs() {
        assert!(DynamicRange::new(-20.0, -20.0).is_err());
        let r = DynamicRange::new(-70.0, -20.0).unwrap();
        assert!(to_db_normalize(&DMatrix::from_element(1, 1, -1.0), r).is_err());
        assert!(to_db_normalize(&DMatrix::from_element(1, 1, f64::NAN), r).is_err());
    }

    #[test]
    fn reference_ignores_floor_pixels() {
        let d = DMatrix::from_row_slice(1, 4, &[0.0, 0.5, 0.0, 1.0]);
        assert!((signal_reference(&d) - 0.625).abs() < 1e-15);
    }
}
