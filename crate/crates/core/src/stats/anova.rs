use super::{check_summaries, dist, summarize, GroupSummary, SampleGroup, StatsError};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnovaResult {
    pub f: f64,
    pub p: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub ss_between: f64,
    pub ss_within: f64,
}

/// One-way ANOVA on raw samples.
pub fn anova_oneway(groups: &[SampleGroup]) -> Result<AnovaResult, StatsError> {
    anova_from_summaries(&summarize(groups)?)
}

/// One-way ANOVA from per-group size, mean and variance.
///
/// Identical values everywhere give `F = 0, p = 1`; zero within-group
/// variance with differing means gives `F = inf, p = 0`.
pub fn anova_from_summaries(groups: &[GroupSummary]) -> Result<AnovaResult, StatsError> {
    check_summaries(groups)?;
    let total: usize = groups.iter().map(|g| g.n).sum();
    let grand = groups.iter().map(|g| g.n as f64 * g.mean).sum::<f64>() / total as f64;
    let ss_between: f64 = groups
        .iter()
        .map(|g| g.n as f64 * (g.mean - grand) * (g.mean - grand))
        .sum();
    let ss_within: f64 = groups.iter().map(|g| (g.n - 1) as f64 * g.variance).sum();
    let df_between = groups.len() - 1;
    let df_within = total - groups.len();
    let (f, p) = if ss_within <= 0.0 {
        if means_equal(groups) {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
        (f, dist::f_sf(f, df_between as f64, df_within as f64)?)
    };
    Ok(AnovaResult {
        f,
        p,
        df_between,
        df_within,
        ss_between,
        ss_within,
    })
}

fn means_equal(groups: &[GroupSummary]) -> bool {
    groups.windows(2).all(|w| w[0].mean == w[1].mean)
}
