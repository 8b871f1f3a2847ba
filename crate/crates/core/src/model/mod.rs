//! State, action and arrival machinery of the slotted model.
//!
//! At the start of slot `t` the system is `(s; x)`: the location of every
//! robot and the number of waiting tasks at every location. A joint action
//! picks serve / idle / switch for each robot, service and travel take one
//! slot, and Bernoulli arrivals join the queues at the end of the slot.

mod action;
mod arrivals;
mod dynamics;
mod state;

pub use action::{ActionClass, JointAction, RobotAction};
pub use arrivals::{arrival_rng, sample_arrivals, ArrivalRng, ArrivalVector, PRNG_ID};
pub use dynamics::{admissible_robot_actions, check_feasible, is_feasible, stage_cost, step, SlotLedger, Transition};
pub use state::{ModelConfig, SystemState};
