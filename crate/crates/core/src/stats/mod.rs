//! Group comparison statistics: one-way ANOVA, Tukey HSD (Tukey-Kramer for
//! unequal sizes) with homogeneous subsets, and the pooled two-sample t-test.

use alloc::string::String;
use alloc::vec::Vec;

mod anova;
pub mod dist;
mod ttest;
mod tukey;

pub use anova::{anova_oneway, anova_from_summaries, AnovaResult};
pub use ttest::{ttest_ind, TTestResult};
pub use tukey::{homogeneous_subsets, tukey_hsd, tukey_hsd_from_summaries, HomogeneousSubset, TukeyResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("group `{label}` has {size} values; at least 2 are required")]
    GroupTooSmall { label: String, size: usize },
    #[error("group `{0}` contains non-finite values")]
    NonFinite(String),
    #[error("invalid distribution parameters")]
    InvalidParameters,
}

/// Labelled sample, e.g. the final-generation objective values of one model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleGroup {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleGroup {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }

    pub fn summary(&self) -> GroupSummary {
        let n = self.values.len();
        let mean = self.values.iter().sum::<f64>() / n as f64;
        let ss: f64 = self.values.iter().map(|v| (v - mean) * (v - mean)).sum();
        GroupSummary {
            label: self.label.clone(),
            n,
            mean,
            variance: if n > 1 { ss / (n - 1) as f64 } else { 0.0 },
        }
    }

    fn check(&self) -> Result<(), StatsError> {
        if self.values.len() < 2 {
            return Err(StatsError::GroupTooSmall {
                label: self.label.clone(),
                size: self.values.len(),
            });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(self.label.clone()));
        }
        Ok(())
    }
}

/// Size, mean and unbiased variance of a group.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupSummary {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

pub(crate) fn summarize(groups: &[SampleGroup]) -> Result<Vec<GroupSummary>, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    groups
        .iter()
        .map(|g| g.check().map(|_| g.summary()))
        .collect()
}

pub(crate) fn check_summaries(groups: &[GroupSummary]) -> Result<(), StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    for g in groups {
        if g.n < 2 {
            return Err(StatsError::GroupTooSmall {
                label: g.label.clone(),
                size: g.n,
            });
        }
        if !g.mean.is_finite() || !g.variance.is_finite() || g.variance < 0.0 {
            return Err(StatsError::NonFinite(g.label.clone()));
        }
    }
    Ok(())
}

/// Full comparison of groups on a minimised quantity: ANOVA, Tukey HSD, the
/// best (lowest-mean) group and the groups not significantly worse than it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StatsReport {
    pub anova: AnovaResult,
    pub tukey: TukeyResult,
    pub best_group: String,
    /// Groups whose Tukey p-value against the best group is at least alpha
    /// (the best group itself excluded).
    pub best_equivalents: Vec<String>,
}

pub fn compare_groups(groups: &[SampleGroup], alpha: f64) -> Result<StatsReport, StatsError> {
    report_from_summaries(&summarize(groups)?, alpha)
}

pub fn report_from_summaries(groups: &[GroupSummary], alpha: f64) -> Result<StatsReport, StatsError> {
    let anova = anova_from_summaries(groups)?;
    let tukey = tukey_hsd_from_summaries(groups, alpha)?;
    let best = (0..groups.len())
        .min_by(|&a, &b| groups[a].mean.total_cmp(&groups[b].mean).then(a.cmp(&b)))
        .expect("at least two groups");
    let best_equivalents = (0..groups.len())
        .filter(|&j| j != best && !tukey.significant(best, j))
        .map(|j| groups[j].label.clone())
        .collect();
    Ok(StatsReport {
        anova,
        best_group: groups[best].label.clone(),
        best_equivalents,
        tukey,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn forced_separation_has_single_winner() {
        let groups = vec![
            SampleGroup::new("b", vec![10.0, 11.0, 12.0, 10.5]),
            SampleGroup::new("a", vec![0.0, 0.5, 1.0, 0.2]),
            SampleGroup::new("c", vec![10.2, 11.5, 11.9, 10.1]),
        ];
        let r = compare_groups(&groups, 0.05).unwrap();
        assert!(r.anova.p < 0.05);
        assert_eq!(r.best_group, "a");
        assert!(r.best_equivalents.is_empty());
    }

    #[test]
    fn reconstructed_deviation_winners() {
        // printed means of the 8-model deviation comparison, 100 values each,
        // common sd reconstructed from the printed subset significance
        let means = [
            ("model 1", 1389.3287),
            ("model 2", 1371.4854),
            ("model 3", 1460.8188),
            ("model 4", 915.1014),
            ("model 5", 1487.5328),
            ("model 6", 1019.1698),
            ("model 7", 1492.2259),
            ("model 8", 1034.7571),
        ];
        let summaries: Vec<GroupSummary> = means
            .iter()
            .map(|&(label, mean)| GroupSummary {
                label: label.into(),
                n: 100,
                mean,
                variance: 557.54 * 557.54,
            })
            .collect();
        let r = report_from_summaries(&summaries, 0.05).unwrap();
        assert!(r.anova.p < 0.001);
        assert_eq!(r.best_group, "model 4");
        assert_eq!(r.best_equivalents, vec!["model 6", "model 8"]);
    }

    #[test]
    fn summary_uses_unbiased_variance() {
        let s = SampleGroup::new("x", vec![1.0, 2.0, 3.0, 4.0]).summary();
        assert_eq!(s.n, 4);
        assert!((s.mean - 2.5).abs() < 1e-15);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
    }
}
