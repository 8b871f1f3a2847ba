use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{aggregate, run_episode, MetricSummary};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::policies::{resolve_dwell, DwellReport, DwellRule, PolicyKind, PolicySpec, DEFAULT_DWELL_SEARCH_MAX};

/// Discount used for the simulation experiments unless overridden.
pub const DEFAULT_DISCOUNT: f64 = 0.99;

/// One (cell, policy) experiment: `episodes` independent runs of
/// `horizon` slots, episode `k` seeded with `base_seed + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub policy: PolicySpec,
    pub horizon: u64,
    pub episodes: usize,
    pub base_seed: u64,
    /// Load factor with `p = alpha * M / N`, when the cell was built that way.
    pub alpha: Option<f64>,
    /// How the cyclic dwell was chosen, for cyclic cells.
    pub dwell: Option<DwellReport>,
}

impl ExperimentConfig {
    pub fn new(
        model: ModelConfig,
        policy: PolicySpec,
        horizon: u64,
        episodes: usize,
        base_seed: u64,
        alpha: Option<f64>,
    ) -> Result<Self> {
        let config = Self {
            model,
            policy,
            horizon,
            episodes,
            base_seed,
            alpha,
            dwell: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least one slot".into()));
        }
        if self.episodes == 0 {
            return Err(Error::InvalidConfig("need at least one episode".into()));
        }
        if let Some(alpha) = self.alpha {
            let n = self.model.num_locations() as f64;
            let m = self.model.num_robots() as f64;
            let p = alpha * m / n;
            if self.model.arrival_probs().iter().any(|&q| (q - p).abs() > 1e-12) {
                return Err(Error::InvalidConfig(format!(
                    "arrival probabilities do not equal alpha * M / N = {p}"
                )));
            }
        }
        Ok(())
    }

    pub fn episode_seed(&self, episode: usize) -> u64 {
        self.base_seed.wrapping_add(episode as u64)
    }

    /// Mean arrival probability (the common `p` for symmetric cells).
    pub fn p(&self) -> f64 {
        let probs = self.model.arrival_probs();
        probs.iter().sum::<f64>() / probs.len() as f64
    }
}

/// Declarative description of a policy-comparison grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// `(N, M)` pairs.
    pub cells: Vec<(usize, usize)>,
    pub alphas: Vec<f64>,
    pub policies: Vec<PolicyKind>,
    pub horizon: u64,
    pub episodes: usize,
    pub base_seed: u64,
    pub discount: f64,
    pub dwell_rule: DwellRule,
    pub dwell_search_max: u32,
}

impl GridSpec {
    /// `N = 6`, `M` in {2, 3}, `alpha` in {0.2, 0.5, 0.8}, all three
    /// policies, 100 episodes of 10 000 slots.
    pub fn standard() -> Self {
        Self {
            cells: vec![(6, 2), (6, 3)],
            alphas: vec![0.2, 0.5, 0.8],
            policies: PolicyKind::ALL.to_vec(),
            horizon: 10_000,
            episodes: 100,
            base_seed: 1,
            discount: DEFAULT_DISCOUNT,
            dwell_rule: DwellRule::Floor,
            dwell_search_max: DEFAULT_DWELL_SEARCH_MAX,
        }
    }

    /// Expand into configs ordered by cell, then alpha, then policy.
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>> {
        let mut out = Vec::new();
        for &(n, m) in &self.cells {
            for &alpha in &self.alphas {
                let p = alpha * m as f64 / n as f64;
                let model = ModelConfig::symmetric(n, m, p, self.discount)?;
                for &kind in &self.policies {
                    let (policy, dwell) = match kind {
                        PolicyKind::Esl => (PolicySpec::Esl, None),
                        PolicyKind::Fcfs => (PolicySpec::Fcfs, None),
                        PolicyKind::Cyclic => {
                            let per_robot = n.div_ceil(m);
                            let report = resolve_dwell(p, per_robot, self.dwell_rule, self.dwell_search_max)?;
                            (PolicySpec::Cyclic { dwell: report.dwell }, Some(report))
                        }
                    };
                    let mut config = ExperimentConfig::new(
                        model.clone(),
                        policy,
                        self.horizon,
                        self.episodes,
                        self.base_seed,
                        Some(alpha),
                    )?;
                    config.dwell = dwell;
                    out.push(config);
                }
            }
        }
        Ok(out)
    }
}

/// Aggregated outcome of one (cell, policy) experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub num_locations: usize,
    pub num_robots: usize,
    pub alpha: Option<f64>,
    pub p: f64,
    pub policy: PolicyKind,
    pub dwell: Option<DwellReport>,
    #[serde(flatten)]
    pub summary: MetricSummary,
}

/// Run every config, episodes in parallel, results in input order.
///
/// Episode seeds are `base_seed + k` for every config, so policies sharing
/// a cell and base seed run on common random numbers.
pub fn run_grid(grid: &[ExperimentConfig]) -> Result<Vec<AggregateResult>> {
    grid.iter()
        .map(|config| {
            config.validate()?;
            let metrics = (0..config.episodes)
                .into_par_iter()
                .map(|k| run_episode(config, config.episode_seed(k)))
                .collect::<Result<Vec<_>>>()?;
            Ok(AggregateResult {
                num_locations: config.model.num_locations(),
                num_robots: config.model.num_robots(),
                alpha: config.alpha,
                p: config.p(),
                policy: config.policy.kind(),
                dwell: config.dwell.clone(),
                summary: aggregate(&metrics)?,
            })
        })
        .collect()
}
