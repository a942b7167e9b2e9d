//! Two Gaussian blobs in the plane, each with its own linear outcome.
//!
//! The bundled `data/two_blobs.csv` is `two_blobs(&TwoBlobs::default())`.

use predclusters_core::Dataset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBlobs {
    pub per_blob: usize,
    pub centers: [[f64; 2]; 2],
    pub spread: f64,
    /// Intercept and two slopes per blob.
    pub coefficients: [[f64; 3]; 2],
    pub noise: f64,
    pub seed: u64,
}

impl Default for TwoBlobs {
    fn default() -> Self {
        Self {
            per_blob: 75,
            centers: [[0.0, 0.0], [8.0, 8.0]],
            spread: 1.0,
            coefficients: [[2.0, 1.5, -0.5], [20.0, -1.0, 2.0]],
            noise: 0.1,
            seed: 20_240_517,
        }
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Rows of blob 0 come first, then blob 1. Values are rounded to 6 decimals
/// so the CSV form is exact.
pub fn two_blobs(blobs: &TwoBlobs) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(blobs.seed);
    let location = Normal::new(0.0, blobs.spread).expect("finite spread");
    let noise = Normal::new(0.0, blobs.noise).expect("finite noise");
    let mut rows = Vec::with_capacity(2 * blobs.per_blob);
    let mut outcome = Vec::with_capacity(2 * blobs.per_blob);
    for (center, coef) in blobs.centers.iter().zip(&blobs.coefficients) {
        for _ in 0..blobs.per_blob {
            let x1 = round6(center[0] + location.sample(&mut rng));
            let x2 = round6(center[1] + location.sample(&mut rng));
            let y = coef[0] + coef[1] * x1 + coef[2] * x2 + noise.sample(&mut rng);
            rows.push(vec![x1, x2]);
            outcome.push(round6(y));
        }
    }
    Dataset::from_rows(&rows, outcome)
        .expect("well-formed synthetic data")
        .with_names(vec!["x1".into(), "x2".into()], "y".into())
}

/// Blob index (0 or 1) of each row produced by [`two_blobs`].
pub fn two_blobs_labels(blobs: &TwoBlobs) -> Vec<usize> {
    (0..2 * blobs.per_blob).map(|i| i / blobs.per_blob).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let blobs = TwoBlobs::default();
        let a = two_blobs(&blobs);
        assert_eq!((a.n(), a.d()), (150, 2));
        assert_eq!(a, two_blobs(&blobs));
        let labels = two_blobs_labels(&blobs);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 75);
    }

    #[test]
    fn bundled_file_matches_generator() {
        let text = include_str!("../data/two_blobs.csv");
        let bundled = crate::data::read_csv(text.as_bytes(), &crate::data::TargetColumn::Last).unwrap();
        assert_eq!(bundled, two_blobs(&TwoBlobs::default()));
    }

    #[test]
    fn blobs_are_separated() {
        let ds = two_blobs(&TwoBlobs::default());
        for (i, row) in ds.rows().enumerate() {
            let s = row[0] + row[1];
            if i < 75 {
                assert!(s < 8.0, "row {i}");
            } else {
                assert!(s > 8.0, "row {i}");
            }
        }
    }
}
