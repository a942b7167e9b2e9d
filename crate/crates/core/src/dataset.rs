//! Feature matrix plus outcome vector.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("dataset needs at least 2 observations, got {0}")]
    EmptyDataset(usize),
    #[error("dataset needs at least one feature column")]
    NoFeatures,
    #[error("expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

/// Feature scaling applied before clustering. The outcome is never scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Normalization {
    #[default]
    None,
    /// `(x - mean) / sd` with the population standard deviation.
    Zscore,
    /// `(x - min) / (max - min)`.
    Minmax,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::None => "none",
            Normalization::Zscore => "zscore",
            Normalization::Minmax => "minmax",
        })
    }
}

impl FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Normalization::None),
            "zscore" => Ok(Normalization::Zscore),
            "minmax" => Ok(Normalization::Minmax),
            other => Err(alloc::format!(
                "unknown normalization `{other}` (expected none, zscore or minmax)"
            )),
        }
    }
}

/// Per-column affine transform `x' = (x - offset) / scale`.
///
/// A column that was constant gets `scale == 0` and maps to all zeros.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizationParams {
    pub mode: Normalization,
    pub offsets: Vec<f64>,
    pub scales: Vec<f64>,
}

/// Immutable `N x d` feature matrix (row-major) with its outcome column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    outcome: Vec<f64>,
    n: usize,
    d: usize,
    feature_names: Vec<String>,
    outcome_name: String,
    source_path: String,
    normalization: Option<NormalizationParams>,
}

impl Dataset {
    /// Builds a dataset from a row-major feature buffer.
    pub fn new(features: Vec<f64>, d: usize, outcome: Vec<f64>) -> Result<Self, DatasetError> {
        if d == 0 {
            return Err(DatasetError::NoFeatures);
        }
        let n = outcome.len();
        if n < 2 {
            return Err(DatasetError::EmptyDataset(n));
        }
        if features.len() != n * d {
            return Err(DatasetError::ShapeMismatch {
                expected: n * d,
                actual: features.len(),
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        if let Some(row) = outcome.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::NonFinite { row, col: d });
        }
        Ok(Self {
            features,
            outcome,
            n,
            d,
            feature_names: (1..=d).map(|j| alloc::format!("x{j}")).collect(),
            outcome_name: "y".to_string(),
            source_path: String::new(),
            normalization: None,
        })
    }

    /// Builds a dataset from feature rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>], outcome: Vec<f64>) -> Result<Self, DatasetError> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.len() != outcome.len() {
            return Err(DatasetError::ShapeMismatch {
                expected: outcome.len(),
                actual: rows.len(),
            });
        }
        let mut flat = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(DatasetError::ShapeMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::new(flat, d, outcome)
    }

    pub fn with_names(mut self, feature_names: Vec<String>, outcome_name: String) -> Self {
        assert_eq!(feature_names.len(), self.d, "one name per feature column");
        self.feature_names = feature_names;
        self.outcome_name = outcome_name;
        self
    }

    pub fn with_source(mut self, path: impl Into<String>) -> Self {
        self.source_path = path.into();
        self
    }

    /// Number of observations.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of feature columns.
    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.d)
    }

    #[inline]
    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    /// Parameters of the last normalization applied, if any.
    pub fn normalization(&self) -> Option<&NormalizationParams> {
        self.normalization.as_ref()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    /// Returns a copy with the features transformed; the outcome is untouched.
    pub fn normalize(&self, mode: Normalization) -> Dataset {
        let mut out = self.clone();
        if mode == Normalization::None {
            return out;
        }
        let n = self.n as f64;
        let mut offsets = Vec::with_capacity(self.d);
        let mut scales = Vec::with_capacity(self.d);
        for j in 0..self.d {
            let (min, max) = self
                .column(j)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            let constant = min == max;
            let (offset, scale) = match mode {
                Normalization::Zscore => {
                    let mean = self.column(j).sum::<f64>() / n;
                    let var = self.column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                    (mean, if constant { 0.0 } else { math::sqrt(var) })
                }
                Normalization::Minmax => (min, if constant { 0.0 } else { max - min }),
                Normalization::None => unreachable!(),
            };
            offsets.push(offset);
            scales.push(scale);
        }
        for row in out.features.chunks_exact_mut(self.d) {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if scales[j] == 0.0 {
                    0.0
                } else {
                    (*v - offsets[j]) / scales[j]
                };
            }
        }
        out.normalization = Some(NormalizationParams {
            mode,
            offsets,
            scales,
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn column_dataset(col: &[f64]) -> Dataset {
        let outcome = (0..col.len()).map(|i| i as f64).collect();
        Dataset::new(col.to_vec(), 1, outcome).unwrap()
    }

    #[test]
    fn minmax_maps_to_unit_interval() {
        let ds = column_dataset(&[0.0, 5.0, 10.0]).normalize(Normalization::Minmax);
        assert_eq!(ds.features(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn zscore_uses_population_sd() {
        let ds = column_dataset(&[2.0, 4.0, 6.0]).normalize(Normalization::Zscore);
        // population sd of [2,4,6] is sqrt(8/3)
        let sd = libm::sqrt(8.0 / 3.0);
        let expected = [-2.0 / sd, 0.0, 2.0 / sd];
        for (a, b) in ds.features().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let params = ds.normalization().unwrap();
        assert_eq!(params.offsets, vec![4.0]);
    }

    #[test]
    fn constant_column_becomes_zero() {
        for mode in [Normalization::Zscore, Normalization::Minmax] {
            let ds = column_dataset(&[0.1, 0.1, 0.1]).normalize(mode);
            assert_eq!(ds.features(), &[0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn none_is_identity_and_outcome_untouched() {
        let ds = Dataset::from_rows(&[vec![1.0, 9.0], vec![3.0, -2.0]], vec![2.0, 4.0]).unwrap();
        assert_eq!(ds.normalize(Normalization::None), ds);
        for mode in [Normalization::Zscore, Normalization::Minmax] {
            assert_eq!(ds.normalize(mode).outcome(), ds.outcome());
        }
    }

    #[test]
    fn rejects_tiny_or_malformed_input() {
        assert_eq!(
            Dataset::new(vec![1.0], 1, vec![1.0]),
            Err(DatasetError::EmptyDataset(1))
        );
        assert_eq!(
            Dataset::new(vec![], 0, vec![1.0, 2.0]),
            Err(DatasetError::NoFeatures)
        );
        assert!(matches!(
            Dataset::new(vec![1.0, f64::NAN], 1, vec![1.0, 2.0]),
            Err(DatasetError::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn parses_mode_names() {
        assert_eq!("zscore".parse::<Normalization>(), Ok(Normalization::Zscore));
        assert!("scale".parse::<Normalization>().is_err());
    }
}
