use super::{ArrivalVector, JointAction, RobotAction, SystemState};
use crate::error::{Error, Result};

/// Actions robot `robot` may take on its own, ignoring the other robots.
///
/// Order: serve (when the current location is nonempty), idle, then
/// switches by increasing destination.
pub fn admissible_robot_actions(state: &SystemState, robot: usize) -> Vec<RobotAction> {
    let here = state.location_of(robot);
    let mut out = Vec::with_capacity(state.num_locations() + 1);
    if state.queues()[here] > 0 {
        out.push(RobotAction::Serve);
    }
    out.push(RobotAction::Idle);
    out.extend(
        (0..state.num_locations())
            .filter(|&j| j != here)
            .map(RobotAction::Switch),
    );
    out
}

/// Checks per-robot admissibility, one server per location, and the
/// next-slot collision rule, returning the first violation found.
pub fn check_feasible(state: &SystemState, joint: &JointAction) -> Result<()> {
    let n = state.num_locations();
    if joint.len() != state.num_robots() {
        return Err(Error::InfeasibleAction(format!(
            "{} actions for {} robots",
            joint.len(),
            state.num_robots()
        )));
    }
    // Robots sit on distinct locations, so at most one can serve any of
    // them; the serve count below is still checked directly.
    let mut servers = vec![0u32; n];
    let mut next_occupants = vec![0u32; n];
    for (r, &act) in joint.actions().iter().enumerate() {
        let here = state.location_of(r);
        match act {
            RobotAction::Serve => {
                if state.queues()[here] == 0 {
                    return Err(Error::InfeasibleAction(format!(
                        "robot {} serves empty location {}",
                        r + 1,
                        here + 1
                    )));
                }
                servers[here] += 1;
                next_occupants[here] += 1;
            }
            RobotAction::Idle => next_occupants[here] += 1,
            RobotAction::Switch(j) => {
                if j >= n || j == here {
                    return Err(Error::InfeasibleAction(format!(
                        "robot {} cannot switch to location {}",
                        r + 1,
                        j + 1
                    )));
                }
                next_occupants[j] += 1;
            }
        }
    }
    if let Some(i) = servers.iter().position(|&c| c > 1) {
        return Err(Error::InfeasibleAction(format!("location {} served twice", i + 1)));
    }
    if let Some(i) = next_occupants.iter().position(|&c| c > 1) {
        return Err(Error::InfeasibleAction(format!(
            "collision at location {} next slot",
            i + 1
        )));
    }
    Ok(())
}

pub fn is_feasible(state: &SystemState, joint: &JointAction) -> bool {
    check_feasible(state, joint).is_ok()
}

/// One-period holding cost: total number of waiting tasks.
pub fn stage_cost(state: &SystemState) -> u64 {
    state.total_backlog()
}

/// Result of applying one slot of dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub next: SystemState,
    /// `departures[i]` is true iff location `i` was served this slot.
    pub departures: Vec<bool>,
}

/// `x_i' = x_i - d_i + a_i`; serving and idling robots stay, switching
/// robots land on their destination.
pub fn step(state: &SystemState, joint: &JointAction, arrivals: &ArrivalVector) -> Result<Transition> {
    check_feasible(state, joint)?;
    if arrivals.indicators().len() != state.num_locations() {
        return Err(Error::InvalidState(format!(
            "{} arrival indicators for {} locations",
            arrivals.indicators().len(),
            state.num_locations()
        )));
    }
    let mut queues = state.queues().to_vec();
    let mut robots = state.robots().to_vec();
    let mut departures = vec![false; queues.len()];
    for (r, &act) in joint.actions().iter().enumerate() {
        match act {
            RobotAction::Serve => departures[robots[r]] = true,
            RobotAction::Idle => {}
            RobotAction::Switch(j) => robots[r] = j,
        }
    }
    for ((q, &d), &a) in queues.iter_mut().zip(&departures).zip(arrivals.indicators()) {
        *q = *q - d as u64 + a as u64;
    }
    Ok(Transition {
        next: SystemState::from_parts_unchecked(robots, queues),
        departures,
    })
}

/// Cumulative arrival and departure counts per location, plus the
/// departure indicators of the most recent slot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlotLedger {
    pub departures: Vec<bool>,
    pub cumulative_arrivals: Vec<u64>,
    pub cumulative_departures: Vec<u64>,
}

impl SlotLedger {
    pub fn new(num_locations: usize) -> Self {
        Self {
            departures: vec![false; num_locations],
            cumulative_arrivals: vec![0; num_locations],
            cumulative_departures: vec![0; num_locations],
        }
    }

    pub fn record(&mut self, arrivals: &ArrivalVector, departures: &[bool]) {
        self.departures.clear();
        self.departures.extend_from_slice(departures);
        for (c, &a) in self.cumulative_arrivals.iter_mut().zip(arrivals.indicators()) {
            *c += a as u64;
        }
        for (c, &d) in self.cumulative_departures.iter_mut().zip(departures) {
            *c += d as u64;
        }
    }

    pub fn total_arrivals(&self) -> u64 {
        self.cumulative_arrivals.iter().sum()
    }

    pub fn total_departures(&self) -> u64 {
        self.cumulative_departures.iter().sum()
    }
}
