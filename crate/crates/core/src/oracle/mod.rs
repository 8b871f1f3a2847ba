//! Exact verification on a truncated MDP and sample-path coupling.
//!
//! [`build_truncated_mdp`] enumerates every state with queues capped at
//! `C` (arrivals to a full queue are dropped), [`value_iteration`] solves
//! it, and [`check_esl_optimality`] compares ESL's joint action against all
//! feasible alternatives through their Q-values at interior states.
//! [`coupled_run`] replays the interchange arguments behind the structural
//! results on concrete arrival paths.

mod check;
mod coupling;
mod mdp;
mod value_iteration;

pub use check::{
    check_candidate, check_esl_optimality, Candidate, CheckOptions, Violation, ViolationKind, ViolationReport,
    DEFAULT_MARGIN, DEFAULT_TIE_TOLERANCE,
};
pub use coupling::{coupled_run, run_coupling_suite, CouplingReport, CouplingSummary, Scenario, ScenarioKind};
pub use mdp::{build_truncated_mdp, build_truncated_mdp_with, BuildOptions, TruncatedMdp};
pub use value_iteration::{q_values, value_iteration, ValueTable};

/// Discount used by oracle runs unless overridden.
pub const DEFAULT_ORACLE_DISCOUNT: f64 = 0.9;
