use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_summaries, dist, summarize, GroupSummary, SampleGroup, StatsError};
use crate::math;

/// Consecutive run of groups (by ascending mean) that are pairwise
/// indistinguishable at the chosen significance level.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomogeneousSubset {
    /// Indices into the input groups, ordered by ascending mean.
    pub members: Vec<usize>,
    pub labels: Vec<String>,
    pub means: Vec<f64>,
    /// Smallest pairwise p-value inside the subset (1 for a singleton).
    pub min_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TukeyResult {
    pub labels: Vec<String>,
    pub means: Vec<f64>,
    pub sizes: Vec<usize>,
    /// Symmetric; `None` on the diagonal.
    pub p_values: Vec<Vec<Option<f64>>>,
    pub q_stats: Vec<Vec<Option<f64>>>,
    pub mse: f64,
    pub df: usize,
    pub alpha: f64,
    pub subsets: Vec<HomogeneousSubset>,
}

impl TukeyResult {
    pub fn p(&self, i: usize, j: usize) -> Option<f64> {
        self.p_values[i][j]
    }

    pub fn significant(&self, i: usize, j: usize) -> bool {
        self.p(i, j).is_some_and(|p| p < self.alpha)
    }
}

/// Tukey HSD on raw samples; unequal sizes use the Tukey-Kramer standard
/// error.
pub fn tukey_hsd(groups: &[SampleGroup], alpha: f64) -> Result<TukeyResult, StatsError> {
    tukey_hsd_from_summaries(&summarize(groups)?, alpha)
}

pub fn tukey_hsd_from_summaries(groups: &[GroupSummary], alpha: f64) -> Result<TukeyResult, StatsError> {
    check_summaries(groups)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidParameters);
    }
    let k = groups.len();
    let total: usize = groups.iter().map(|g| g.n).sum();
    let df = total - k;
    let mse = groups.iter().map(|g| (g.n - 1) as f64 * g.variance).sum::<f64>() / df as f64;

    let mut p_values = vec![vec![None; k]; k];
    let mut q_stats = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let diff = (groups[i].mean - groups[j].mean).abs();
            let (q, p) = if mse <= 0.0 {
                if diff == 0.0 {
                    (0.0, 1.0)
                } else {
                    (f64::INFINITY, 0.0)
                }
            } else {
                let se = math::sqrt(0.5 * mse * (1.0 / groups[i].n as f64 + 1.0 / groups[j].n as f64));
                let q = diff / se;
                (q, dist::studentized_range_sf(q, k, df as f64)?)
            };
            p_values[i][j] = Some(p);
            p_values[j][i] = Some(p);
            q_stats[i][j] = Some(q);
            q_stats[j][i] = Some(q);
        }
    }
    let means: Vec<f64> = groups.iter().map(|g| g.mean).collect();
    let labels: Vec<String> = groups.iter().map(|g| g.label.clone()).collect();
    let subsets = homogeneous_subsets(&means, &labels, &p_values, alpha);
    Ok(TukeyResult {
        labels,
        means,
        sizes: groups.iter().map(|g| g.n).collect(),
        p_values,
        q_stats,
        mse,
        df,
        alpha,
        subsets,
    })
}

/// Greedy construction over groups sorted by mean: from each start, extend
/// while the newcomer is non-significant against every member already in;
/// subsets contained in an earlier one are dropped.
pub fn homogeneous_subsets(
    means: &[f64],
    labels: &[String],
    p_values: &[Vec<Option<f64>>],
    alpha: f64,
) -> Vec<HomogeneousSubset> {
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    let p = |a: usize, b: usize| p_values[a][b].unwrap_or(1.0);

    let mut subsets: Vec<HomogeneousSubset> = Vec::new();
    let mut reach = None;
    for start in 0..order.len() {
        let mut end = start;
        while end + 1 < order.len() && (start..=end).all(|m| p(order[m], order[end + 1]) >= alpha) {
            end += 1;
        }
        if reach.is_some_and(|r| end <= r) {
            continue;
        }
        reach = Some(end);
        let members: Vec<usize> = order[start..=end].to_vec();
        let mut min_p: f64 = 1.0;
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                min_p = min_p.min(p(a, b));
            }
        }
        subsets.push(HomogeneousSubset {
            labels: members.iter().map(|&m| labels[m].clone()).collect(),
            means: members.iter().map(|&m| means[m]).collect(),
            members,
            min_p,
        });
    }
    subsets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ttest_ind;
    use alloc::format;
    use proptest::prelude::*;

    fn groups(values: &[&[f64]]) -> Vec<SampleGroup> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| SampleGroup::new(format!("g{i}"), v.to_vec()))
            .collect()
    }

    #[test]
    fn identical_groups() {
        let g = groups(&[&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]]);
        let r = tukey_hsd(&g, 0.05).unwrap();
        for i in 0..3 {
            assert_eq!(r.p(i, i), None);
            for j in 0..3 {
                if i != j {
                    assert!((r.p(i, j).unwrap() - 1.0).abs() < 1e-12);
                }
            }
        }
        assert_eq!(r.subsets.len(), 1);
        assert_eq!(r.subsets[0].members, vec![0, 1, 2]);
    }

    #[test]
    fn constant_groups() {
        let r = tukey_hsd(&groups(&[&[3.0, 3.0], &[3.0, 3.0]]), 0.05).unwrap();
        assert_eq!(r.p(0, 1), Some(1.0));
        let r = tukey_hsd(&groups(&[&[3.0, 3.0], &[4.0, 4.0]]), 0.05).unwrap();
        assert_eq!(r.p(0, 1), Some(0.0));
        assert_eq!(r.subsets.len(), 2);
    }

    #[test]
    fn two_groups_match_t_test() {
        for (a, b) in [
            (vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]),
            (vec![0.3, 1.9, 2.2, 0.8], vec![1.1, 2.5, 3.0, 2.8, 1.7]),
            (vec![10.0, 12.0, 11.0], vec![10.5, 11.5, 12.5]),
        ] {
            let (ga, gb) = (SampleGroup::new("a", a), SampleGroup::new("b", b));
            let t = ttest_ind(&ga, &gb).unwrap();
            let r = tukey_hsd(&[ga, gb], 0.05).unwrap();
            let q = r.q_stats[0][1].unwrap();
            assert!((q - core::f64::consts::SQRT_2 * t.t.abs()).abs() < 1e-9);
            assert!((r.p(0, 1).unwrap() - t.p).abs() < 1e-6, "{} vs {}", r.p(0, 1).unwrap(), t.p);
        }
    }

    /// Summary statistics reconstructed from the published 8-model deviation
    /// comparison: the means as printed, 100 values per model, and a common
    /// within-model sd chosen so that the printed significance of the first
    /// subset (0.798) is reproduced by the studentized range tail at (k=8, df=792).
    fn reconstructed_deviation_summaries() -> Vec<GroupSummary> {
        let sd: f64 = 557.54;
        [
            ("model 4", 915.1014),
            ("model 6", 1019.1698),
            ("model 8", 1034.7571),
            ("model 2", 1371.4854),
            ("model 1", 1389.3287),
            ("model 3", 1460.8188),
            ("model 5", 1487.5328),
            ("model 7", 1492.2259),
        ]
        .iter()
        .map(|&(label, mean)| GroupSummary {
            label: label.into(),
            n: 100,
            mean,
            variance: sd * sd,
        })
        .collect()
    }

    #[test]
    fn reconstructed_deviation_subsets() {
        let r = tukey_hsd_from_summaries(&reconstructed_deviation_summaries(), 0.05).unwrap();
        let sets: Vec<Vec<String>> = r.subsets.iter().map(|s| s.labels.clone()).collect();
        assert_eq!(
            sets,
            vec![
                vec!["model 4", "model 6", "model 8"],
                vec!["model 2", "model 1", "model 3", "model 5", "model 7"],
            ]
        );
        // the second subset's significance (0.791) is a genuine prediction
        assert!((r.subsets[0].min_p - 0.798).abs() < 5e-3, "{}", r.subsets[0].min_p);
        assert!((r.subsets[1].min_p - 0.791).abs() < 5e-3, "{}", r.subsets[1].min_p);
        // model 4 vs model 6 is printed as 0.892
        assert!((r.p(0, 1).unwrap() - 0.892).abs() < 5e-3);
    }

    fn reorder_case() -> Vec<SampleGroup> {
        groups(&[
            &[5.0, 6.0, 7.0, 6.5],
            &[1.0, 1.5, 2.0, 1.2],
            &[5.5, 6.2, 6.8, 7.1],
            &[1.1, 2.1, 1.7, 1.3],
        ])
    }

    #[test]
    fn separated_blocks() {
        let r = tukey_hsd(&reorder_case(), 0.05).unwrap();
        let sets: Vec<Vec<usize>> = r.subsets.iter().map(|s| s.members.clone()).collect();
        assert_eq!(sets, vec![vec![1, 3], vec![0, 2]]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn structural_invariants(
            data in prop::collection::vec(prop::collection::vec(-20.0f64..20.0, 2..10), 2..6),
            offsets in prop::collection::vec(-10.0f64..10.0, 6),
        ) {
            let g: Vec<SampleGroup> = data.iter().enumerate()
                .map(|(i, v)| SampleGroup::new(format!("g{i}"), v.iter().map(|x| x * 0.3 + offsets[i]).collect()))
                .collect();
            let r = tukey_hsd(&g, 0.05).unwrap();
            let k = g.len();
            for i in 0..k {
                prop_assert!(r.p(i, i).is_none());
                for j in 0..k {
                    if i != j {
                        let p = r.p(i, j).unwrap();
                        prop_assert!((0.0..=1.0).contains(&p));
                        prop_assert_eq!(r.p(i, j), r.p(j, i));
                    }
                }
                prop_assert!(r.subsets.iter().any(|s| s.members.contains(&i)));
            }
            for s in &r.subsets {
                for a in &s.members {
                    for b in &s.members {
                        if a != b {
                            prop_assert!(!r.significant(*a, *b));
                        }
                    }
                }
            }
        }
    }
}
