//! Reward and evaluation arithmetic: relative improvement, clipped reward
//! labels, gap improvement, and the aggregation statistics used in reports.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default reward clipping constant.
pub const R_MIN: f64 = -1.5;

/// Evaluation floor assigned to hard-stopped runs under the 3x stop rule.
pub const HARD_STOP_DELTA: f64 = -3.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("reference effort must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("empty sample list")]
    Empty,
}

/// Relative improvement (t0 - t_pi) / t0 of a policy over the reference.
pub fn rel_improvement(t0: f64, t_pi: f64) -> Result<f64, MetricError> {
    if t0 <= 0.0 {
        return Err(MetricError::NonPositiveReference(t0));
    }
    Ok((t0 - t_pi) / t0)
}

/// Mean of per-run improvements, each floored at `r_min`.
pub fn clipped_reward(deltas: &[f64], r_min: f64) -> Result<f64, MetricError> {
    if deltas.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(deltas.iter().map(|d| d.max(r_min)).sum::<f64>() / deltas.len() as f64)
}

/// Relative gap improvement (g0 - g_pi) / (max(g0, g_pi) + eps); the max in
/// the denominator keeps it antisymmetric and division-safe.
pub fn gap_improvement(g0: f64, g_pi: f64, eps: f64) -> f64 {
    (g0 - g_pi) / (g0.max(g_pi) + eps)
}

/// One evaluated instance: reference effort/time, policy effort/time, and
/// the relative improvement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImprovementSample {
    pub instance: String,
    pub t0: f64,
    pub t_pi: f64,
    pub delta: f64,
}

impl ImprovementSample {
    pub fn new(instance: impl Into<String>, t0: f64, t_pi: f64) -> Result<Self, MetricError> {
        let delta = rel_improvement(t0, t_pi)?;
        Ok(ImprovementSample {
            instance: instance.into(),
            t0,
            t_pi,
            delta,
        })
    }
}

/// Summary statistics of a sample list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub median: f64,
    pub iqm: f64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Median, interquartile mean (mean of samples within [Q1, Q3] inclusive),
/// mean, and population standard deviation.
pub fn aggregate(samples: &[f64]) -> Result<Aggregate, MetricError> {
    if samples.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let median = quantile(&sorted, 0.5);
    let q1 = quantile(&sorted, 0.25);
    let q3 = quantile(&sorted, 0.75);
    let inner: Vec<f64> = sorted
        .iter()
        .copied()
        .filter(|&v| v >= q1 - 1e-15 && v <= q3 + 1e-15)
        .collect();
    let iqm = inner.iter().sum::<f64>() / inner.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let var = sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    Ok(Aggregate {
        median,
        iqm,
        mean,
        std: var.sqrt(),
        count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_improvement_examples() {
        assert_eq!(rel_improvement(10.0, 4.0).unwrap(), 0.6);
        assert_eq!(rel_improvement(10.0, 10.0).unwrap(), 0.0);
        // The evaluation floor under the 3x hard stop.
        assert_eq!(rel_improvement(10.0, 40.0).unwrap(), HARD_STOP_DELTA);
        assert!(matches!(
            rel_improvement(0.0, 1.0),
            Err(MetricError::NonPositiveReference(_))
        ));
    }

    #[test]
    fn rel_improvement_is_scale_invariant() {
        for alpha in [0.5, 2.0, 117.0] {
            let a = rel_improvement(10.0, 7.0).unwrap();
            let b = rel_improvement(10.0 * alpha, 7.0 * alpha).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn clipped_reward_examples() {
        assert_eq!(clipped_reward(&[0.5], R_MIN).unwrap(), 0.5);
        assert_eq!(clipped_reward(&[-2.0, -2.0], R_MIN).unwrap(), -1.5);
        let v = clipped_reward(&[0.4, -2.0, 0.2], R_MIN).unwrap();
        assert!((v - (0.4 - 1.5 + 0.2) / 3.0).abs() < 1e-12);
        assert!((v - (-0.3)).abs() < 1e-12);
        assert_eq!(clipped_reward(&[], R_MIN), Err(MetricError::Empty));
    }

    #[test]
    fn clipped_reward_is_monotone_and_floored() {
        let base = clipped_reward(&[0.1, -0.7, 0.3], R_MIN).unwrap();
        let bumped = clipped_reward(&[0.2, -0.7, 0.3], R_MIN).unwrap();
        assert!(bumped >= base);
        assert!(clipped_reward(&[-100.0, -50.0], R_MIN).unwrap() >= R_MIN);
    }

    #[test]
    fn gap_improvement_examples() {
        assert!((gap_improvement(0.5, 0.25, 1e-9) - 0.5).abs() < 1e-8);
        assert_eq!(gap_improvement(0.0, 0.0, 1e-9), 0.0);
        // Antisymmetry.
        for (a, b) in [(0.3, 0.7), (0.0, 0.2), (0.9, 0.1)] {
            let f = gap_improvement(a, b, 1e-9);
            let r = gap_improvement(b, a, 1e-9);
            assert!((f + r).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregate_examples() {
        let a = aggregate(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(a.median, 3.0);
        assert_eq!(a.mean, 3.0);

        let c = aggregate(&[7.0, 7.0, 7.0]).unwrap();
        assert_eq!(c.std, 0.0);
        assert_eq!(c.iqm, 7.0);

        // Outlier resistance: IQM strictly below the mean.
        let o = aggregate(&[0.0, 0.0, 0.0, 100.0]).unwrap();
        assert!(o.iqm < o.mean);
    }

    #[test]
    fn median_resists_single_corruption_on_odd_lists() {
        let base = aggregate(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap().median;
        let hi = aggregate(&[1.0, 2.0, 3.0, 4.0, 1e18]).unwrap().median;
        let lo = aggregate(&[-1e18, 2.0, 3.0, 4.0, 5.0]).unwrap().median;
        assert_eq!(base, hi);
        assert_eq!(base, lo);
    }
}
