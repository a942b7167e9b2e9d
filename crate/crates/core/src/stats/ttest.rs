use super::{dist, SampleGroup, StatsError};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TTestResult {
    pub t: f64,
    pub p: f64,
    pub df: usize,
    pub mean_a: f64,
    pub mean_b: f64,
}

/// Two-sided independent-samples t-test with pooled variance.
pub fn ttest_ind(a: &SampleGroup, b: &SampleGroup) -> Result<TTestResult, StatsError> {
    a.check()?;
    b.check()?;
    let (sa, sb) = (a.summary(), b.summary());
    let df = sa.n + sb.n - 2;
    let pooled = ((sa.n - 1) as f64 * sa.variance + (sb.n - 1) as f64 * sb.variance) / df as f64;
    let diff = sa.mean - sb.mean;
    let (t, p) = if pooled <= 0.0 {
        if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(diff), 0.0)
        }
    } else {
        let se = crate::math::sqrt(pooled * (1.0 / sa.n as f64 + 1.0 / sb.n as f64));
        let t = diff / se;
        (t, dist::t_two_sided_p(t, df as f64)?)
    };
    Ok(TTestResult {
        t,
        p,
        df,
        mean_a: sa.mean,
        mean_b: sb.mean,
    })
}
