use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{ArrivalVector, JointAction, RobotAction, SystemState};

/// Arrival slot of every waiting task, oldest first, per location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskAgeBook {
    arrivals: Vec<VecDeque<u64>>,
}

impl TaskAgeBook {
    pub fn new(num_locations: usize) -> Self {
        Self {
            arrivals: vec![VecDeque::new(); num_locations],
        }
    }

    /// Book with explicit arrival slots per location. Each list must be
    /// non-decreasing.
    pub fn from_arrivals(arrivals: Vec<Vec<u64>>) -> Result<Self> {
        for (i, list) in arrivals.iter().enumerate() {
            if list.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::AgeBookDesync(format!(
                    "arrival slots at location {} are not in FIFO order",
                    i + 1
                )));
            }
        }
        Ok(Self {
            arrivals: arrivals.into_iter().map(VecDeque::from).collect(),
        })
    }

    pub fn oldest(&self, location: usize) -> Option<u64> {
        self.arrivals[location].front().copied()
    }

    pub fn len_at(&self, location: usize) -> usize {
        self.arrivals[location].len()
    }

    pub fn check_consistent(&self, state: &SystemState) -> Result<()> {
        if self.arrivals.len() != state.num_locations() {
            return Err(Error::AgeBookDesync(format!(
                "book tracks {} locations, state has {}",
                self.arrivals.len(),
                state.num_locations()
            )));
        }
        for (i, (list, &x)) in self.arrivals.iter().zip(state.queues()).enumerate() {
            if list.len() as u64 != x {
                return Err(Error::AgeBookDesync(format!(
                    "location {} holds {x} tasks but the book lists {}",
                    i + 1,
                    list.len()
                )));
            }
        }
        Ok(())
    }

    /// Remove the served head tasks and append this slot's arrivals.
    pub fn record(&mut self, departures: &[bool], arrivals: &ArrivalVector, now: u64) -> Result<()> {
        for (i, (&d, &a)) in departures.iter().zip(arrivals.indicators()).enumerate() {
            let list = &mut self.arrivals[i];
            if d && list.pop_front().is_none() {
                return Err(Error::AgeBookDesync(format!(
                    "departure from empty book at location {}",
                    i + 1
                )));
            }
            if a {
                list.push_back(now);
            }
        }
        Ok(())
    }
}

/// First-come-first-serve per task.
///
/// Nonempty locations are ranked by the age of their oldest task (oldest
/// first; a location with a robot on it wins ties, then the lower index).
/// Walking the ranking, a location keeps the robot already standing on it,
/// otherwise the lowest-indexed robot not yet matched switches there.
/// Matching stops when every robot has a location; robots left over idle.
pub fn fcfs_decide(state: &SystemState, book: &TaskAgeBook, now: u64) -> Result<JointAction> {
    book.check_consistent(state)?;
    let n = state.num_locations();
    let m = state.num_robots();

    let mut host = vec![None; n];
    for (r, &loc) in state.robots().iter().enumerate() {
        host[loc] = Some(r);
    }

    let mut ranked = Vec::with_capacity(n);
    for i in 0..n {
        if let Some(arrived) = book.oldest(i) {
            if arrived > now {
                return Err(Error::AgeBookDesync(format!(
                    "task at location {} arrives at slot {arrived}, after slot {now}",
                    i + 1
                )));
            }
            ranked.push((now - arrived, host[i].is_some(), i));
        }
    }
    // Larger age first, hosted before unhosted, lower index first.
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));

    let mut actions: Vec<Option<RobotAction>> = vec![None; m];
    for &(_, _, loc) in ranked.iter().take(m) {
        match host[loc] {
            Some(r) if actions[r].is_none() => {
                actions[r] = Some(RobotAction::Serve);
            }
            _ => {
                // Either nobody stands here or its robot was already sent
                // elsewhere; nobody else has claimed `loc`, so any move in
                // is collision-free.
                let r = actions
                    .iter()
                    .position(Option::is_none)
                    .expect("an unmatched robot exists");
                actions[r] = Some(RobotAction::Switch(loc));
            }
        }
    }

    let actions = actions
        .into_iter()
        .enumerate()
        .map(|(r, a)| {
            a.unwrap_or(if state.queue_at_robot(r) > 0 {
                RobotAction::Serve
            } else {
                RobotAction::Idle
            })
        })
        .collect();
    Ok(JointAction(actions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_feasible;
    use RobotAction::*;

    fn st(robots: &[usize], queues: &[u64]) -> SystemState {
        SystemState::from_one_based(robots, queues).unwrap()
    }

    #[test]
    fn older_task_elsewhere_wins() {
        // now = 10: ages 5 and 9.
        let book = TaskAgeBook::from_arrivals(vec![vec![5], vec![1]]).unwrap();
        let j = fcfs_decide(&st(&[1], &[1, 1]), &book, 10).unwrap();
        assert_eq!(j.0, vec![Switch(1)]);
    }

    #[test]
    fn tie_favors_staying() {
        let book = TaskAgeBook::from_arrivals(vec![vec![3], vec![3]]).unwrap();
        let j = fcfs_decide(&st(&[1], &[1, 1]), &book, 10).unwrap();
        assert_eq!(j.0, vec![Serve]);
    }

    #[test]
    fn equal_ages_serve_in_place() {
        let book = TaskAgeBook::from_arrivals(vec![vec![6], vec![6], vec![]]).unwrap();
        let j = fcfs_decide(&st(&[1, 2], &[1, 1, 0]), &book, 10).unwrap();
        assert_eq!(j.0, vec![Serve, Serve]);
    }

    #[test]
    fn pulled_robot_leaves_its_location_to_another() {
        // Oldest at 3 (unhosted), then 1 (hosted by robot 1), then 2.
        // Robot 1 is lowest unmatched, goes to 3; location 1 is then taken
        // over by robot 2.
        let book = TaskAgeBook::from_arrivals(vec![vec![4], vec![8], vec![0]]).unwrap();
        let s = st(&[1, 2], &[1, 1, 1]);
        let j = fcfs_decide(&s, &book, 10).unwrap();
        assert_eq!(j.0, vec![Switch(2), Switch(0)]);
        assert!(is_feasible(&s, &j));
    }

    #[test]
    fn desync_detected() {
        let book = TaskAgeBook::from_arrivals(vec![vec![1, 2], vec![]]).unwrap();
        let err = fcfs_decide(&st(&[1], &[1, 0]), &book, 10).unwrap_err();
        assert!(err.to_string().contains("age book desync"));
        assert!(TaskAgeBook::from_arrivals(vec![vec![4, 2]]).is_err());
    }

    #[test]
    fn record_pops_and_pushes() {
        let mut book = TaskAgeBook::from_arrivals(vec![vec![1, 2], vec![]]).unwrap();
        book.record(&[true, false], &ArrivalVector(vec![false, true]), 7)
            .unwrap();
        assert_eq!(book.oldest(0), Some(2));
        assert_eq!(book.oldest(1), Some(7));
        assert!(book
            .record(&[false, true], &ArrivalVector(vec![false, false]), 8)
            .is_ok());
        assert!(book
            .record(&[false, true], &ArrivalVector(vec![false, false]), 9)
            .is_err());
    }
}
