use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static parameters of one model instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    num_locations: usize,
    num_robots: usize,
    arrival_probs: Vec<f64>,
    discount: f64,
}

impl ModelConfig {
    pub fn new(num_locations: usize, num_robots: usize, arrival_probs: Vec<f64>, discount: f64) -> Result<Self> {
        if num_locations == 0 || num_robots == 0 {
            return Err(Error::InvalidConfig("need at least one location and one robot".into()));
        }
        if num_robots > num_locations {
            return Err(Error::InvalidConfig(format!(
                "{num_robots} robots cannot fit on {num_locations} locations"
            )));
        }
        if arrival_probs.len() != num_locations {
            return Err(Error::InvalidConfig(format!(
                "expected {num_locations} arrival probabilities, got {}",
                arrival_probs.len()
            )));
        }
        if let Some(p) = arrival_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidConfig(format!("arrival probability {p} outside [0, 1]")));
        }
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::InvalidConfig(format!("discount {discount} outside (0, 1)")));
        }
        Ok(Self {
            num_locations,
            num_robots,
            arrival_probs,
            discount,
        })
    }

    /// Identical arrival probability `p` at every location.
    pub fn symmetric(num_locations: usize, num_robots: usize, p: f64, discount: f64) -> Result<Self> {
        Self::new(num_locations, num_robots, vec![p; num_locations], discount)
    }

    pub fn num_locations(&self) -> usize {
        self.num_locations
    }

    pub fn num_robots(&self) -> usize {
        self.num_robots
    }

    pub fn arrival_probs(&self) -> &[f64] {
        &self.arrival_probs
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn with_discount(mut self, discount: f64) -> Result<Self> {
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::InvalidConfig(format!("discount {discount} outside (0, 1)")));
        }
        self.discount = discount;
        Ok(self)
    }

    pub fn is_symmetric(&self) -> bool {
        self.arrival_probs.windows(2).all(|w| w[0] == w[1])
    }

    /// Robot `r` at location `r`, all queues empty.
    pub fn empty_state(&self) -> SystemState {
        SystemState {
            robots: (0..self.num_robots).collect(),
            queues: vec![0; self.num_locations],
        }
    }
}

/// Robot locations and queue lengths at the start of a slot.
///
/// Invariant: no two robots share a location and every robot sits on a
/// valid location index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemState {
    robots: Vec<usize>,
    queues: Vec<u64>,
}

impl SystemState {
    /// Zero-based robot locations and queue lengths.
    pub fn new(robots: Vec<usize>, queues: Vec<u64>) -> Result<Self> {
        let n = queues.len();
        if robots.is_empty() || robots.len() > n {
            return Err(Error::InvalidState(format!("{} robots on {n} locations", robots.len())));
        }
        let mut seen = vec![false; n];
        for (r, &loc) in robots.iter().enumerate() {
            if loc >= n {
                return Err(Error::InvalidState(format!(
                    "robot {} at location {} of {n}",
                    r + 1,
                    loc + 1
                )));
            }
            if std::mem::replace(&mut seen[loc], true) {
                return Err(Error::InvalidState(format!("co-location at location {}", loc + 1)));
            }
        }
        Ok(Self { robots, queues })
    }

    /// Same as [`SystemState::new`] but with one-based robot locations.
    pub fn from_one_based(robots: &[usize], queues: &[u64]) -> Result<Self> {
        if robots.contains(&0) {
            return Err(Error::InvalidState("location indices start at 1".into()));
        }
        Self::new(robots.iter().map(|r| r - 1).collect(), queues.to_vec())
    }

    pub fn robots(&self) -> &[usize] {
        &self.robots
    }

    pub fn queues(&self) -> &[u64] {
        &self.queues
    }

    pub fn num_locations(&self) -> usize {
        self.queues.len()
    }

    pub fn num_robots(&self) -> usize {
        self.robots.len()
    }

    pub fn location_of(&self, robot: usize) -> usize {
        self.robots[robot]
    }

    pub fn queue_at_robot(&self, robot: usize) -> u64 {
        self.queues[self.robots[robot]]
    }

    pub fn robot_at(&self, location: usize) -> Option<usize> {
        self.robots.iter().position(|&l| l == location)
    }

    pub fn total_backlog(&self) -> u64 {
        self.queues.iter().sum()
    }

    /// Exchange the labels of two locations: queue contents and any robot
    /// standing on either of them.
    pub fn swap_locations(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        out.queues.swap(a, b);
        for loc in &mut out.robots {
            if *loc == a {
                *loc = b;
            } else if *loc == b {
                *loc = a;
            }
        }
        out
    }

    pub(crate) fn from_parts_unchecked(robots: Vec<usize>, queues: Vec<u64>) -> Self {
        debug_assert!(Self::new(robots.clone(), queues.clone()).is_ok());
        Self { robots, queues }
    }
}

#[derive(Serialize, Deserialize)]
struct OneBasedState {
    robots: Vec<usize>,
    queues: Vec<u64>,
}

impl Serialize for SystemState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OneBasedState {
            robots: self.robots.iter().map(|r| r + 1).collect(),
            queues: self.queues.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SystemState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = OneBasedState::deserialize(deserializer)?;
        SystemState::from_one_based(&raw.robots, &raw.queues).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Display for SystemState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.robots.iter().map(|r| (r + 1).to_string()).collect();
        let x: Vec<String> = self.queues.iter().map(|q| q.to_string()).collect();
        write!(f, "(s=({}); x=({}))", s.join(","), x.join(","))
    }
}
