//! Sorted real eigenvalue multisets and their comparison.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default absolute tolerance for eigenvalue comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Ascending multiset of real energies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the input. NaN is rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("NaN in spectrum".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Every value repeated `factor` times.
    pub fn replicated(&self, factor: usize) -> Self {
        Self {
            values: self
                .values
                .iter()
                .flat_map(|&v| std::iter::repeat_n(v, factor))
                .collect(),
        }
    }

    /// `index,eigenvalue` rows, 17 significant digits.
    pub fn to_csv(&self, value_header: &str) -> String {
        let mut out = format!("index,{value_header}\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v:.16e}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumMatch {
    pub matched: bool,
    pub max_dev: f64,
}

/// Compare `larger` against `smaller` with every entry of `smaller` counted
/// `multiplicity` times. Both are sorted, so the comparison is elementwise.
pub fn spectra_match(
    smaller: &Spectrum,
    larger: &Spectrum,
    multiplicity: usize,
    tol: f64,
) -> Result<SpectrumMatch> {
    let expected = smaller.len() * multiplicity;
    if larger.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: larger.len(),
        });
    }
    let max_dev = smaller
        .replicated(multiplicity)
        .values
        .iter()
        .zip(&larger.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumMatch {
        matched: max_dev <= tol,
        max_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubled_match() {
        let a = Spectrum::new(vec![2.0, 1.0]).unwrap();
        let b = Spectrum::new(vec![1.0, 2.0, 1.0, 2.0]).unwrap();
        let m = spectra_match(&a, &b, 2, DEFAULT_TOL).unwrap();
        assert!(m.matched);
        assert_eq!(m.max_dev, 0.0);
    }

    #[test]
    fn small_shift_is_detected() {
        let a = Spectrum::new(vec![0.0]).unwrap();
        let b = Spectrum::new(vec![0.0, 1e-3]).unwrap();
        let m = spectra_match(&a, &b, 2, 1e-9).unwrap();
        assert!(!m.matched);
        assert!((m.max_dev - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn length_mismatch() {
        let a = Spectrum::new(vec![0.0, 1.0]).unwrap();
        let b = Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(
            spectra_match(&a, &b, 2, 1e-9),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let s = Spectrum::new(vec![1.0 / 3.0]).unwrap();
        assert_eq!(
            s.to_csv("eigenvalue"),
            "index,eigenvalue\n0,3.3333333333333331e-1\n"
        );
        assert!(Spectrum::new(vec![f64::NAN]).is_err());
    }
}
