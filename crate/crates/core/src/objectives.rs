//! The two minimised objectives: k-medians deviation and the macro-averaged
//! absolute prediction error of the outcome.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::Dataset;
use crate::genotype::{l1, Genotype, Partition};
use crate::linalg::solve_least_squares;

/// How the outcome is predicted from a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegressionMode {
    /// Clusters as predictors: one simple regression of `y` on the numeric
    /// cluster label `1..=K`.
    #[cfg_attr(feature = "serde", serde(rename = "CP"))]
    Cp,
    /// Local regression: a separate multiple linear regression per cluster.
    #[cfg_attr(feature = "serde", serde(rename = "LR"))]
    Lr,
}

impl fmt::Display for RegressionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegressionMode::Cp => "CP",
            RegressionMode::Lr => "LR",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectiveValues {
    pub deviation: f64,
    pub mae: f64,
}

impl ObjectiveValues {
    pub fn new(deviation: f64, mae: f64) -> Self {
        Self { deviation, mae }
    }

    #[inline]
    pub fn as_array(&self) -> [f64; 2] {
        [self.deviation, self.mae]
    }
}

/// Componentwise-median centre of every cluster, stored row-major `K x d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Centers {
    values: Vec<f64>,
    d: usize,
}

impl Centers {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        Self {
            values: rows.iter().flatten().copied().collect(),
            d,
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        if self.d == 0 {
            0
        } else {
            self.values.len() / self.d
        }
    }

    #[inline]
    pub fn center(&self, cluster: usize) -> &[f64] {
        &self.values[cluster * self.d..(cluster + 1) * self.d]
    }

    pub(crate) fn center_mut(&mut self, cluster: usize) -> &mut [f64] {
        &mut self.values[cluster * self.d..(cluster + 1) * self.d]
    }
}

/// Median with the midpoint convention for even counts. Sorts `values`.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn compute_centers(p: &Partition, dataset: &Dataset) -> Centers {
    let d = dataset.d();
    let mut values = Vec::with_capacity(p.k() * d);
    let mut scratch = Vec::new();
    for members in p.members() {
        for j in 0..d {
            scratch.clear();
            scratch.extend(members.iter().map(|&i| dataset.row(i)[j]));
            values.push(median_in_place(&mut scratch));
        }
    }
    Centers { values, d }
}

/// Sum over clusters and members of the L1 distance to the cluster centre.
pub fn deviation(p: &Partition, centers: &Centers, dataset: &Dataset) -> f64 {
    p.members()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let mu = centers.center(c);
            members.iter().map(|&i| l1(dataset.row(i), mu)).sum::<f64>()
        })
        .sum()
}

/// Fitted regression and in-sample predictions for every observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRegression {
    pub mode: RegressionMode,
    /// LR: `d + 1` coefficients (intercept first) per cluster.
    /// CP: a single `[b0, b1]` entry.
    pub coefficients: Vec<Vec<f64>>,
    pub predictions: Vec<f64>,
}

/// Ordinary least squares of `y` on all features plus an intercept, fitted
/// separately on each cluster. A singleton cluster predicts its own outcome.
pub fn fit_lr(p: &Partition, dataset: &Dataset) -> ClusterRegression {
    let d = dataset.d();
    let q = d + 1;
    let y = dataset.outcome();
    let mut predictions = vec![0.0; dataset.n()];
    let mut coefficients = Vec::with_capacity(p.k());
    let mut design = Vec::new();
    let mut targets = Vec::new();
    for members in p.members() {
        if members.len() == 1 {
            let i = members[0];
            let mut coef = vec![0.0; q];
            coef[0] = y[i];
            predictions[i] = y[i];
            coefficients.push(coef);
            continue;
        }
        design.clear();
        targets.clear();
        for &i in members {
            design.push(1.0);
            design.extend_from_slice(dataset.row(i));
            targets.push(y[i]);
        }
        let coef = solve_least_squares(&design, q, &targets)
            .expect("dataset values are finite by construction");
        for &i in members {
            predictions[i] = coef[0]
                + coef[1..]
                    .iter()
                    .zip(dataset.row(i))
                    .map(|(b, x)| b * x)
                    .sum::<f64>();
        }
        coefficients.push(coef);
    }
    ClusterRegression {
        mode: RegressionMode::Lr,
        coefficients,
        predictions,
    }
}

/// Simple regression `y = b0 + b1 * label` over all observations, with
/// labels numbered `1..=K` in canonical cluster order.
pub fn fit_cp(p: &Partition, dataset: &Dataset) -> ClusterRegression {
    let y = dataset.outcome();
    let n = y.len() as f64;
    let x: Vec<f64> = p.labels().iter().map(|&l| (l + 1) as f64).collect();
    let x_mean = x.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - x_mean) * (yi - y_mean);
        sxx += (xi - x_mean) * (xi - x_mean);
    }
    let (b0, b1) = if p.k() < 2 || sxx == 0.0 {
        (y_mean, 0.0)
    } else {
        let b1 = sxy / sxx;
        (y_mean - b1 * x_mean, b1)
    };
    ClusterRegression {
        mode: RegressionMode::Cp,
        coefficients: vec![vec![b0, b1]],
        predictions: x.iter().map(|xi| b0 + b1 * xi).collect(),
    }
}

pub fn fit(p: &Partition, dataset: &Dataset, mode: RegressionMode) -> ClusterRegression {
    match mode {
        RegressionMode::Lr => fit_lr(p, dataset),
        RegressionMode::Cp => fit_cp(p, dataset),
    }
}

/// Mean over clusters of each cluster's mean absolute residual.
///
/// Every cluster weighs the same regardless of its size; this is not the
/// pooled mean over all observations.
pub fn mae(p: &Partition, predictions: &[f64], dataset: &Dataset) -> f64 {
    let y = dataset.outcome();
    let total: f64 = p
        .members()
        .iter()
        .map(|members| {
            members
                .iter()
                .map(|&i| (y[i] - predictions[i]).abs())
                .sum::<f64>()
                / members.len() as f64
        })
        .sum();
    total / p.k() as f64
}

pub fn evaluate_partition(p: &Partition, dataset: &Dataset, mode: RegressionMode) -> ObjectiveValues {
    let centers = compute_centers(p, dataset);
    let dev = deviation(p, &centers, dataset);
    let reg = fit(p, dataset, mode);
    ObjectiveValues::new(dev, mae(p, &reg.predictions, dataset))
}

/// Decodes `g` and scores it. Deterministic: no randomness is involved.
pub fn evaluate(g: &Genotype, dataset: &Dataset, mode: RegressionMode) -> ObjectiveValues {
    evaluate_partition(&g.decode(), dataset, mode)
}
