use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A policy produced a joint action that violates admissibility or
    /// collision constraints. Never repaired silently.
    #[error("infeasible action: {0}")]
    InfeasibleAction(String),

    #[error("age book desync: {0}")]
    AgeBookDesync(String),

    #[error("degenerate rate: p = {0} (need 0 < p < 1)")]
    DegenerateRate(f64),

    #[error("insufficient replications: {0} episode(s), need at least 2")]
    InsufficientReplications(usize),

    #[error("state space too large: {states} states exceeds budget {budget}")]
    StateSpaceTooLarge { states: u128, budget: u64 },

    #[error("scenario precondition: {0}")]
    ScenarioPrecondition(String),
}
