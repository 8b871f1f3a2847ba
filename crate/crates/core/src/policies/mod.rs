//! Routing rules compared in the experiments.
//!
//! Every rule is a deterministic function of the current state and its own
//! memory. [`Policy`] wraps the three rules behind one interface so the
//! episode runner does not care which one it drives.

mod cyclic;
mod dwell;
mod esl;
mod fcfs;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cyclic::{cyclic_decide, CyclicCursor, CyclicPlan};
pub use dwell::{
    continuous_dwell_optimum, dwell_objective, optimize_dwell, resolve_dwell, DwellReport, DwellRule,
    DEFAULT_DWELL_SEARCH_MAX,
};
pub use esl::{esl_decide, shortest_switch_decide};
pub use fcfs::{fcfs_decide, TaskAgeBook};

use crate::error::{Error, Result};
use crate::model::{check_feasible, ArrivalVector, JointAction, ModelConfig, SystemState};

/// Policy names accepted in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Esl,
    Fcfs,
    Cyclic,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Esl, PolicyKind::Fcfs, PolicyKind::Cyclic];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Esl => "esl",
            PolicyKind::Fcfs => "fcfs",
            PolicyKind::Cyclic => "cyclic",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "esl" => Ok(PolicyKind::Esl),
            "fcfs" => Ok(PolicyKind::Fcfs),
            "cyclic" => Ok(PolicyKind::Cyclic),
            other => Err(Error::InvalidConfig(format!(
                "unknown policy {other:?} (expected esl, fcfs or cyclic)"
            ))),
        }
    }
}

/// A fully parameterized policy choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum PolicySpec {
    Esl,
    Fcfs,
    Cyclic { dwell: u32 },
}

impl PolicySpec {
    pub fn kind(&self) -> PolicyKind {
        match self {
            PolicySpec::Esl => PolicyKind::Esl,
            PolicySpec::Fcfs => PolicyKind::Fcfs,
            PolicySpec::Cyclic { .. } => PolicyKind::Cyclic,
        }
    }
}

/// A policy plus whatever memory it carries through an episode.
#[derive(Debug, Clone)]
pub enum Policy {
    Esl,
    Fcfs(TaskAgeBook),
    Cyclic(CyclicPlan),
}

impl Policy {
    pub fn new(spec: &PolicySpec, config: &ModelConfig) -> Result<Self> {
        Ok(match spec {
            PolicySpec::Esl => Policy::Esl,
            PolicySpec::Fcfs => Policy::Fcfs(TaskAgeBook::new(config.num_locations())),
            PolicySpec::Cyclic { dwell } => {
                Policy::Cyclic(CyclicPlan::new(config.num_locations(), config.num_robots(), *dwell)?)
            }
        })
    }

    /// Empty queues; robot `r` at location `r`, except that cyclic robots
    /// start at the head of their own block.
    pub fn initial_state(&self, config: &ModelConfig) -> SystemState {
        match self {
            Policy::Cyclic(plan) => plan.initial_state(),
            _ => config.empty_state(),
        }
    }

    pub fn decide(&mut self, state: &SystemState, now: u64) -> Result<JointAction> {
        let joint = match self {
            Policy::Esl => esl_decide(state),
            Policy::Fcfs(book) => fcfs_decide(state, book, now)?,
            Policy::Cyclic(plan) => {
                let (joint, next) = cyclic_decide(state, plan);
                *plan = next;
                joint
            }
        };
        if cfg!(debug_assertions) {
            check_feasible(state, &joint)?;
        }
        Ok(joint)
    }

    /// Feed back what happened during slot `now` after the decision.
    pub fn observe(&mut self, departures: &[bool], arrivals: &ArrivalVector, now: u64) -> Result<()> {
        if let Policy::Fcfs(book) = self {
            book.record(departures, arrivals, now)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!("ESL".parse::<PolicyKind>().unwrap(), PolicyKind::Esl);
        assert_eq!("fcfs".parse::<PolicyKind>().unwrap(), PolicyKind::Fcfs);
        assert_eq!(" cyclic ".parse::<PolicyKind>().unwrap(), PolicyKind::Cyclic);
        assert!("random".parse::<PolicyKind>().is_err());
    }
}
