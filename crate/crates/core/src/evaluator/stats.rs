use serde::{Deserialize, Serialize};

use super::EpisodeMetrics;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const NORMAL_95: f64 = 1.96;

/// Sample mean and 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci: f64,
}

impl Estimate {
    /// `1.96 * s / sqrt(R)` with the `R - 1` sample standard deviation.
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let r = values.len();
        if r < 2 {
            return Err(Error::InsufficientReplications(r));
        }
        let rf = r as f64;
        let mean = values.iter().sum::<f64>() / rf;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (rf - 1.0);
        Ok(Self {
            mean,
            ci: NORMAL_95 * var.sqrt() / rf.sqrt(),
        })
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci
    }

    /// Standard error implied by the half-width.
    pub fn std_error(&self) -> f64 {
        self.ci / NORMAL_95
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub episodes: usize,
    pub discounted_cost: Estimate,
    pub mean_queue_length: Estimate,
    pub serve: Estimate,
    pub switch: Estimate,
    pub idle: Estimate,
}

pub fn aggregate(metrics: &[EpisodeMetrics]) -> Result<MetricSummary> {
    if metrics.len() < 2 {
        return Err(Error::InsufficientReplications(metrics.len()));
    }
    let column = |f: fn(&EpisodeMetrics) -> f64| -> Result<Estimate> {
        Estimate::from_samples(&metrics.iter().map(f).collect::<Vec<_>>())
    };
    Ok(MetricSummary {
        episodes: metrics.len(),
        discounted_cost: column(|m| m.discounted_cost)?,
        mean_queue_length: column(|m| m.mean_queue_length)?,
        serve: column(|m| m.serve_frac)?,
        switch: column(|m| m.switch_frac)?,
        idle: column(|m| m.idle_frac)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_checked_interval() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.mean, 2.0);
        assert!((e.ci - 1.96 / 3f64.sqrt()).abs() < 1e-15);
        assert!((e.ci - 1.131_606_527_611_666_5).abs() < 1e-12);
    }

    #[test]
    fn identical_values_have_zero_width() {
        let e = Estimate::from_samples(&[4.5; 10]).unwrap();
        assert_eq!(e.ci, 0.0);
    }

    #[test]
    fn single_value_rejected() {
        assert_eq!(Estimate::from_samples(&[1.0]), Err(Error::InsufficientReplications(1)));
        assert!(aggregate(&[]).is_err());
    }
}
