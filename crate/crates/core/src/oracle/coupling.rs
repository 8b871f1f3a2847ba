//! Two coupled systems, G and Π, driven by one arrival sample path.
//!
//! Robot 0 is the robot whose decision is being compared. Every other
//! robot is parked: it serves while its location is nonempty and idles
//! otherwise, so it never moves. This keeps the other robots away from the
//! locations the focal robot visits, which is what the interchange
//! arguments need for several robots.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    arrival_rng, sample_arrivals, step, ArrivalVector, JointAction, ModelConfig, RobotAction, SystemState,
};

const FOCAL: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// Switch away from a nonempty location vs serve first.
    #[serde(rename = "prop1A")]
    Prop1A,
    /// Idle at a nonempty location vs serve.
    #[serde(rename = "prop1B")]
    Prop1B,
    /// Idle at an empty location vs switch, with mirrored arrivals.
    #[serde(rename = "prop2")]
    Prop2,
    /// Switch to the shorter vs the longer location, with swapped arrivals.
    #[serde(rename = "prop4")]
    Prop4,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::Prop1A,
        ScenarioKind::Prop1B,
        ScenarioKind::Prop2,
        ScenarioKind::Prop4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Prop1A => "prop1A",
            ScenarioKind::Prop1B => "prop1B",
            ScenarioKind::Prop2 => "prop2",
            ScenarioKind::Prop4 => "prop4",
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario {s:?}")))
    }
}

/// Locations the construction refers to, fixed from the initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Roles {
    /// Focal location and the location G switches to at t = 0.
    SwitchAway {
        home: usize,
        first: usize,
    },
    Idle {
        home: usize,
    },
    /// Location Π moves to; `excess` is its initial queue.
    Mirror {
        home: usize,
        target: usize,
        excess: u64,
    },
    Swap {
        shorter: usize,
        longer: usize,
        k: u64,
    },
}

/// A validated scenario: kind, model and initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    kind: ScenarioKind,
    config: ModelConfig,
    initial: SystemState,
    roles: Roles,
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::ScenarioPrecondition(msg.into())
}

/// Nonempty locations without a robot.
fn open_locations(state: &SystemState) -> Vec<usize> {
    (0..state.num_locations())
        .filter(|&i| state.queues()[i] > 0 && state.robot_at(i).is_none())
        .collect()
}

fn require_symmetric(config: &ModelConfig, a: usize, b: usize) -> Result<()> {
    let p = config.arrival_probs();
    if p[a] != p[b] {
        return Err(precondition(format!(
            "arrival rates at locations {} and {} differ ({} vs {})",
            a + 1,
            b + 1,
            p[a],
            p[b]
        )));
    }
    Ok(())
}

impl Scenario {
    pub fn new(kind: ScenarioKind, config: ModelConfig, initial: SystemState) -> Result<Self> {
        if initial.num_locations() != config.num_locations() || initial.num_robots() != config.num_robots() {
            return Err(precondition(format!(
                "state {initial} does not fit N={}, M={}",
                config.num_locations(),
                config.num_robots()
            )));
        }
        let home = initial.location_of(FOCAL);
        let x = initial.queues();
        let roles = match kind {
            ScenarioKind::Prop1A | ScenarioKind::Prop1B if x[home] == 0 => {
                return Err(precondition(format!(
                    "{kind} needs robot 1 at a nonempty location, got {initial}"
                )));
            }
            ScenarioKind::Prop1A => {
                let first = (0..initial.num_locations())
                    .filter(|&i| initial.robot_at(i).is_none())
                    .max_by(|&a, &b| x[a].cmp(&x[b]).then(b.cmp(&a)))
                    .ok_or_else(|| precondition(format!("{kind} needs a location without a robot, got {initial}")))?;
                Roles::SwitchAway { home, first }
            }
            ScenarioKind::Prop1B => Roles::Idle { home },
            ScenarioKind::Prop2 | ScenarioKind::Prop4 if x[home] != 0 => {
                return Err(precondition(format!(
                    "{kind} needs robot 1 at an empty location, got {initial}"
                )));
            }
            ScenarioKind::Prop2 => {
                let n = initial.num_locations();
                let target = (1..n)
                    .map(|d| (home + d) % n)
                    .find(|&i| x[i] > 0 && initial.robot_at(i).is_none())
                    .ok_or_else(|| {
                        precondition(format!("{kind} needs an unoccupied nonempty location, got {initial}"))
                    })?;
                require_symmetric(&config, home, target)?;
                Roles::Mirror {
                    home,
                    target,
                    excess: x[target],
                }
            }
            ScenarioKind::Prop4 => {
                let open = open_locations(&initial);
                let shorter = open.iter().copied().min_by_key(|&i| x[i]);
                let longer = open.iter().copied().max_by(|&a, &b| x[a].cmp(&x[b]).then(b.cmp(&a)));
                match (shorter, longer) {
                    (Some(i), Some(j)) if x[i] < x[j] => {
                        require_symmetric(&config, i, j)?;
                        Roles::Swap {
                            shorter: i,
                            longer: j,
                            k: x[j] - x[i],
                        }
                    }
                    _ => {
                        return Err(precondition(format!(
                            "{kind} needs two unoccupied nonempty locations of different length, got {initial}"
                        )))
                    }
                }
            }
        };
        Ok(Self {
            kind,
            config,
            initial,
            roles,
        })
    }

    /// Build from one-based robot locations.
    pub fn from_one_based(kind: ScenarioKind, config: ModelConfig, robots: &[usize], queues: &[u64]) -> Result<Self> {
        Self::new(kind, config, SystemState::from_one_based(robots, queues)?)
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn initial(&self) -> &SystemState {
        &self.initial
    }
}

/// Outcome of one coupled run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub horizon: u64,
    /// `D^π(t) - D^g(t)` for `t = 0..=horizon`.
    pub gap: Vec<i64>,
    /// Slot the scenario's coupling time refers to, if reached.
    pub coupling_time: Option<u64>,
    /// Queue excess of the mirrored location (prop2) or `x_j - x_i` (prop4).
    pub excess: Option<u64>,
    /// `Σ β^t (x^g(t) - x^π(t))` over `t = 0..=horizon`.
    pub cost_difference: f64,
    /// `Σ β^t gap(t)`, the same quantity from departures.
    pub departure_sum: f64,
    /// prop4 only: `Σ_{t=τ+1}^{τ+k} β^t`, truncated at the horizon.
    pub predicted_difference: Option<f64>,
}

impl CouplingReport {
    /// The horizon ended before the pattern could complete.
    pub fn censored(&self) -> bool {
        match (self.scenario, self.coupling_time, self.excess) {
            (_, None, _) => true,
            (ScenarioKind::Prop4, Some(tau), Some(k)) => tau + k >= self.horizon,
            (_, Some(tau), _) => tau >= self.horizon,
        }
    }

    /// Whether the gap sequence has the piecewise form for this scenario
    /// and the backlog and departure forms of the cost difference agree.
    /// Censored runs are checked on the prefix that was observed.
    pub fn check_pattern(&self) -> bool {
        let g = &self.gap;
        let scale = 1.0 + self.cost_difference.abs();
        if (self.cost_difference - self.departure_sum).abs() > 1e-9 * scale || g.first() != Some(&0) {
            return false;
        }
        let tau = self.coupling_time.map(|t| t as usize);
        match self.scenario {
            ScenarioKind::Prop1B => g.iter().enumerate().skip(1).all(|(t, &v)| match tau {
                Some(tau) if t > tau => v == 0,
                _ => v == 1,
            }),
            ScenarioKind::Prop1A => {
                (g.len() < 2 || g[1] == 1)
                    && g.iter().enumerate().skip(2).all(|(t, &v)| match tau {
                        Some(tau) if t > tau => v == 0,
                        _ => v == 0 || v == 1,
                    })
            }
            ScenarioKind::Prop2 => {
                let Some(m) = self.excess.map(|m| m as i64) else {
                    return false;
                };
                (g.len() < 2 || g[1] == 0)
                    && g.windows(2).all(|w| w[1] - w[0] == 0 || w[1] - w[0] == 1)
                    && g.iter().enumerate().all(|(t, &v)| match tau {
                        Some(tau) if t >= tau => v == m,
                        _ => v < m,
                    })
            }
            ScenarioKind::Prop4 => {
                let Some(k) = self.excess.map(|k| k as usize) else {
                    return false;
                };
                g.iter().enumerate().all(|(t, &v)| match tau {
                    Some(tau) if t > tau && t <= tau + k => v == 1,
                    _ => v == 0,
                })
            }
        }
    }
}

/// Both systems, their cumulative departures and the running cost gap.
struct Pair {
    g: SystemState,
    pi: SystemState,
    departed_g: u64,
    departed_pi: u64,
    discount: f64,
    weight: f64,
    gap: Vec<i64>,
    cost_difference: f64,
    departure_sum: f64,
}

impl Pair {
    fn new(initial: &SystemState, discount: f64, horizon: u64) -> Self {
        let mut gap = Vec::with_capacity(horizon as usize + 1);
        gap.push(0);
        Self {
            g: initial.clone(),
            pi: initial.clone(),
            departed_g: 0,
            departed_pi: 0,
            discount,
            weight: 1.0,
            gap,
            cost_difference: 0.0,
            departure_sum: 0.0,
        }
    }

    fn advance(
        &mut self,
        u_g: &JointAction,
        u_pi: &JointAction,
        w_g: &ArrivalVector,
        w_pi: &ArrivalVector,
    ) -> Result<()> {
        let next_g = step(&self.g, u_g, w_g)?;
        let next_pi = step(&self.pi, u_pi, w_pi)?;
        self.departed_g += next_g.departures.iter().filter(|&&d| d).count() as u64;
        self.departed_pi += next_pi.departures.iter().filter(|&&d| d).count() as u64;
        self.g = next_g.next;
        self.pi = next_pi.next;
        self.weight *= self.discount;
        let gap = self.departed_pi as i64 - self.departed_g as i64;
        self.gap.push(gap);
        let backlog_gap = self.g.total_backlog() as f64 - self.pi.total_backlog() as f64;
        self.cost_difference += self.weight * backlog_gap;
        self.departure_sum += self.weight * gap as f64;
        Ok(())
    }
}

fn parked(state: &SystemState, robot: usize) -> RobotAction {
    if state.queue_at_robot(robot) > 0 {
        RobotAction::Serve
    } else {
        RobotAction::Idle
    }
}

fn all_parked(state: &SystemState) -> JointAction {
    JointAction((0..state.num_robots()).map(|r| parked(state, r)).collect())
}

/// Other robots parked; the focal robot serves exhaustively and then heads
/// for the longest nonempty location without a robot (lowest index on ties).
fn parked_esl(state: &SystemState) -> JointAction {
    let mut joint = all_parked(state);
    if state.queue_at_robot(FOCAL) == 0 {
        let x = state.queues();
        if let Some(target) = open_locations(state)
            .into_iter()
            .max_by(|&a, &b| x[a].cmp(&x[b]).then(b.cmp(&a)))
        {
            joint.0[FOCAL] = RobotAction::Switch(target);
        }
    }
    joint
}

fn with_focal(mut joint: JointAction, action: RobotAction) -> JointAction {
    joint.0[FOCAL] = action;
    joint
}

/// Simulate G and Π for `horizon` slots on the arrival path drawn from `seed`.
pub fn coupled_run(scenario: &Scenario, horizon: u64, seed: u64) -> Result<CouplingReport> {
    let config = &scenario.config;
    let p = config.arrival_probs();
    let mut rng = arrival_rng(seed);
    let mut pair = Pair::new(&scenario.initial, config.discount(), horizon);
    let mut tau: Option<u64> = None;
    let mut excess = None;
    let mut predicted = None;

    match scenario.roles {
        Roles::Idle { home } => {
            for t in 0..horizon {
                let w = sample_arrivals(p, &mut rng);
                let (u_g, u_pi) = if t == 0 {
                    let u = all_parked(&pair.g);
                    (with_focal(u.clone(), RobotAction::Idle), u)
                } else if tau.is_none() && pair.pi.queues()[home] == 0 {
                    // Π has emptied home. G serves the one extra task it holds
                    // there while Π idles.
                    tau = Some(t);
                    let u = all_parked(&pair.pi);
                    (
                        with_focal(u.clone(), RobotAction::Serve),
                        with_focal(u, RobotAction::Idle),
                    )
                } else if tau.is_none() {
                    let u = parked_esl(&pair.pi);
                    (u.clone(), u)
                } else {
                    let u = parked_esl(&pair.g);
                    (u.clone(), u)
                };
                pair.advance(&u_g, &u_pi, &w, &w)?;
            }
        }
        Roles::SwitchAway { home, first } => {
            let mut previous_focal = RobotAction::Serve;
            for t in 0..horizon {
                let w = sample_arrivals(p, &mut rng);
                let (u_g, u_pi) = if t == 0 {
                    let u = all_parked(&pair.g);
                    (with_focal(u.clone(), RobotAction::Switch(first)), u)
                } else if tau.is_none() {
                    // Π's focal robot replays G's previous focal action.
                    if pair.g.location_of(FOCAL) == home {
                        tau = Some(t);
                    }
                    let u = parked_esl(&pair.g);
                    (u.clone(), with_focal(u, previous_focal))
                } else {
                    let u = parked_esl(&pair.g);
                    (u.clone(), u)
                };
                previous_focal = u_g.actions()[FOCAL];
                pair.advance(&u_g, &u_pi, &w, &w)?;
            }
        }
        Roles::Mirror {
            home,
            target,
            excess: m,
        } => {
            excess = Some(m);
            for t in 0..horizon {
                let w = sample_arrivals(p, &mut rng);
                let (u_g, u_pi) = if t == 0 {
                    let u = all_parked(&pair.g);
                    (
                        with_focal(u.clone(), RobotAction::Idle),
                        with_focal(u, RobotAction::Switch(target)),
                    )
                } else {
                    (all_parked(&pair.g), all_parked(&pair.pi))
                };
                pair.advance(&u_g, &u_pi, &w, &w.swap_locations(home, target))?;
                if tau.is_none() && *pair.gap.last().expect("gap is never empty") == m as i64 {
                    tau = Some(t + 1);
                }
            }
        }
        Roles::Swap { shorter, longer, k } => {
            excess = Some(k);
            for t in 0..horizon {
                let w = sample_arrivals(p, &mut rng);
                if tau.is_none() && t >= 1 && pair.g.queues()[shorter] == 0 {
                    tau = Some(t);
                }
                let u_g = match tau {
                    _ if t == 0 => with_focal(all_parked(&pair.g), RobotAction::Switch(shorter)),
                    Some(tau) if t == tau => with_focal(all_parked(&pair.g), RobotAction::Switch(longer)),
                    _ => parked_esl(&pair.g),
                };
                let u_pi = match tau {
                    _ if t == 0 => with_focal(all_parked(&pair.pi), RobotAction::Switch(longer)),
                    // Π serves `k` slots past τ, ignoring its new arrivals.
                    Some(tau) if t == tau + k => with_focal(all_parked(&pair.pi), RobotAction::Switch(shorter)),
                    Some(tau) if t > tau + k => u_g.swap_locations(shorter, longer),
                    _ => with_focal(all_parked(&pair.pi), RobotAction::Serve),
                };
                pair.advance(&u_g, &u_pi, &w, &w.swap_locations(shorter, longer))?;
            }
            if let Some(tau) = tau {
                let beta = config.discount();
                let last = (tau + k).min(horizon);
                predicted = Some(((tau + 1)..=last).map(|t| beta.powi(t as i32)).sum());
            }
        }
    }

    Ok(CouplingReport {
        scenario: scenario.kind,
        seed,
        horizon,
        gap: pair.gap,
        coupling_time: tau,
        excess,
        cost_difference: pair.cost_difference,
        departure_sum: pair.departure_sum,
        predicted_difference: predicted,
    })
}

/// Pattern and cost statistics over seeds `base_seed..base_seed + runs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSummary {
    pub scenario: ScenarioKind,
    pub initial: SystemState,
    pub horizon: u64,
    pub runs: usize,
    pub pattern_matches: usize,
    pub mismatched_seeds: Vec<u64>,
    pub censored: usize,
    pub mean_cost_difference: f64,
    pub cost_difference_se: f64,
    pub min_cost_difference: f64,
    /// prop4 only: mean of the per-path predicted difference.
    pub mean_predicted: Option<f64>,
}

impl CouplingSummary {
    pub fn passed(&self) -> bool {
        self.pattern_matches == self.runs
    }
}

pub fn run_coupling_suite(scenario: &Scenario, horizon: u64, base_seed: u64, runs: usize) -> Result<CouplingSummary> {
    if runs < 2 {
        return Err(Error::InsufficientReplications(runs));
    }
    let reports = (0..runs as u64)
        .into_par_iter()
        .map(|k| coupled_run(scenario, horizon, base_seed.wrapping_add(k)))
        .collect::<Result<Vec<_>>>()?;

    let n = runs as f64;
    let diffs: Vec<f64> = reports.iter().map(|r| r.cost_difference).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let predicted: Vec<f64> = reports.iter().filter_map(|r| r.predicted_difference).collect();
    let mismatched_seeds: Vec<u64> = reports.iter().filter(|r| !r.check_pattern()).map(|r| r.seed).collect();

    Ok(CouplingSummary {
        scenario: scenario.kind,
        initial: scenario.initial.clone(),
        horizon,
        runs,
        pattern_matches: runs - mismatched_seeds.len(),
        mismatched_seeds,
        censored: reports.iter().filter(|r| r.censored()).count(),
        mean_cost_difference: mean,
        cost_difference_se: (var / n).sqrt(),
        min_cost_difference: diffs.iter().copied().fold(f64::INFINITY, f64::min),
        mean_predicted: (!predicted.is_empty()).then(|| predicted.iter().sum::<f64>() / predicted.len() as f64),
    })
}
