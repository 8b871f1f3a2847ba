//! Episode simulation, per-episode metrics, confidence intervals and the
//! experiment grid.

mod episode;
mod grid;
mod stats;

pub use episode::{run_episode, run_episode_observed, EpisodeMetrics, SlotRecord};
pub use grid::{run_grid, AggregateResult, ExperimentConfig, GridSpec, DEFAULT_DISCOUNT};
pub use stats::{aggregate, Estimate, MetricSummary, NORMAL_95};
