//! Discrete-time multi-robot, multi-queue task allocation with one-slot
//! switching delays.
//!
//! The crate is split into four layers:
//!
//! - [`model`]: state, actions, Bernoulli arrivals and the slot dynamics.
//! - [`policies`]: Exhaustive-Serve-Longest (ESL), per-task FCFS and
//!   fixed-dwell cyclic routing, plus the cyclic dwell optimizer.
//! - [`evaluator`]: episode simulation, metrics, confidence intervals and
//!   the experiment grid runner.
//! - [`oracle`]: exact value iteration on a truncated MDP, Q-value checks of
//!   the ESL structure, and sample-path coupling harnesses.
//!
//! Locations and robots are indexed from zero internally. Anything that is
//! serialized or shown to a user is one-based.

pub mod error;
pub mod evaluator;
pub mod model;
pub mod oracle;
pub mod policies;

pub use error::{Error, Result};
