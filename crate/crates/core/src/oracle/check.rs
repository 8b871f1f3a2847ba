use serde::{Deserialize, Serialize};

use super::value_iteration::q_values_at;
use super::{TruncatedMdp, ValueTable};
use crate::error::{Error, Result};
use crate::model::{is_feasible, JointAction, RobotAction, SystemState};
use crate::policies::{esl_decide, shortest_switch_decide};

pub const DEFAULT_MARGIN: u64 = 3;
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

/// Decision rule whose actions are checked against the Q-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Candidate {
    Esl,
    /// ESL with free robots sent to the shortest available location.
    SwitchToShortest,
}

impl Candidate {
    pub fn decide(self, state: &SystemState) -> JointAction {
        match self {
            Candidate::Esl => esl_decide(state),
            Candidate::SwitchToShortest => shortest_switch_decide(state),
        }
    }
}

impl std::str::FromStr for Candidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "esl" => Ok(Candidate::Esl),
            "switch-to-shortest" => Ok(Candidate::SwitchToShortest),
            other => Err(Error::InvalidConfig(format!(
                "unknown candidate {other:?} (expected esl or switch-to-shortest)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub margin: u64,
    pub tie_tolerance: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            margin: DEFAULT_MARGIN,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
        }
    }
}

/// Which structural property a violation contradicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// A robot at a nonempty location should serve.
    Prop1,
    /// A robot at an empty location should not idle while an unoccupied
    /// nonempty location exists.
    Prop2,
    /// A free robot should not head for a strictly shorter location.
    Prop3,
    /// The candidate's joint action is not a Q-minimizer for another reason.
    Theorem1,
}

/// One failed comparison. `gap = Q(competitor) - Q(candidate)`: negative
/// beyond the tie tolerance when the competitor is better, and at most the
/// tie tolerance when a strict preference failed to show.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub state: SystemState,
    pub kind: ViolationKind,
    /// One-based robot the comparison is about, if any.
    pub robot: Option<usize>,
    pub candidate_action: String,
    pub competitor_action: String,
    pub q_candidate: f64,
    pub q_competitor: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub num_locations: usize,
    pub num_robots: usize,
    pub cap: u64,
    pub arrival_probs: Vec<f64>,
    pub discount: f64,
    pub margin: u64,
    pub tie_tolerance: f64,
    pub candidate: Candidate,
    pub interior_states: usize,
    pub comparisons: usize,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

pub fn check_esl_optimality(mdp: &TruncatedMdp, table: &ValueTable, margin: u64) -> Result<ViolationReport> {
    check_candidate(
        mdp,
        table,
        CheckOptions {
            margin,
            ..CheckOptions::default()
        },
        Candidate::Esl,
    )
}

/// Nonempty locations without a robot that no robot other than `except`
/// switches into under `joint`.
fn open_targets(state: &SystemState, joint: &JointAction, except: Option<usize>) -> Vec<usize> {
    (0..state.num_locations())
        .filter(|&i| state.queues()[i] > 0 && state.robot_at(i).is_none())
        .filter(|&i| {
            !joint
                .actions()
                .iter()
                .enumerate()
                .any(|(r, &a)| Some(r) != except && a == RobotAction::Switch(i))
        })
        .collect()
}

fn classify(state: &SystemState, joint: &JointAction) -> ViolationKind {
    let x = state.queues();
    let open = open_targets(state, joint, None);
    let acts = joint.actions();
    if (0..acts.len()).any(|r| state.queue_at_robot(r) > 0 && acts[r] != RobotAction::Serve) {
        return ViolationKind::Prop1;
    }
    if !open.is_empty() && (0..acts.len()).any(|r| state.queue_at_robot(r) == 0 && acts[r] == RobotAction::Idle) {
        return ViolationKind::Prop2;
    }
    let shorter = acts.iter().any(|a| match *a {
        RobotAction::Switch(j) => open.iter().any(|&k| x[k] > x[j]),
        _ => false,
    });
    if shorter {
        ViolationKind::Prop3
    } else {
        ViolationKind::Theorem1
    }
}

fn with_action(joint: &JointAction, robot: usize, action: RobotAction) -> JointAction {
    let mut out = joint.clone();
    out.0[robot] = action;
    out
}

/// At every interior state: the candidate's joint action must attain the
/// minimum Q-value within the tie tolerance, and single-robot deviations
/// that the structural results rule out must be strictly worse.
pub fn check_candidate(
    mdp: &TruncatedMdp,
    table: &ValueTable,
    options: CheckOptions,
    candidate: Candidate,
) -> Result<ViolationReport> {
    if options.margin >= mdp.cap() {
        return Err(Error::InvalidConfig(format!(
            "margin {} must be below the cap {}",
            options.margin,
            mdp.cap()
        )));
    }
    let tie = options.tie_tolerance;
    let mut report = ViolationReport {
        num_locations: mdp.config().num_locations(),
        num_robots: mdp.config().num_robots(),
        cap: mdp.cap(),
        arrival_probs: mdp.config().arrival_probs().to_vec(),
        discount: mdp.config().discount(),
        margin: options.margin,
        tie_tolerance: tie,
        candidate,
        interior_states: 0,
        comparisons: 0,
        violations: Vec::new(),
    };

    for index in 0..mdp.num_states() {
        if !mdp.is_interior(index, options.margin) {
            continue;
        }
        report.interior_states += 1;
        let state = mdp.state(index);
        let q = q_values_at(mdp, &table.values, index);
        let chosen = candidate.decide(state);
        let q_of = |joint: &JointAction| q.iter().find(|(a, _)| a == joint).map(|(_, v)| *v);
        let q_chosen =
            q_of(&chosen).ok_or_else(|| Error::InfeasibleAction(format!("candidate action {chosen} at {state}")))?;
        let violation = |kind, robot: Option<usize>, competitor: &JointAction, q_comp: f64| Violation {
            state: state.clone(),
            kind,
            robot: robot.map(|r| r + 1),
            candidate_action: chosen.to_string(),
            competitor_action: competitor.to_string(),
            q_candidate: q_chosen,
            q_competitor: q_comp,
            gap: q_comp - q_chosen,
        };

        let (best, q_best) = q
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(a, v)| (a.clone(), *v))
            .expect("every state has a feasible action");
        report.comparisons += 1;
        if q_chosen > q_best + tie {
            report
                .violations
                .push(violation(classify(state, &chosen), None, &best, q_best));
        }

        let x = state.queues();
        let mut deviations = Vec::new();
        for r in 0..state.num_robots() {
            let here = state.location_of(r);
            match chosen.actions()[r] {
                RobotAction::Serve if x[here] > 0 => {
                    deviations.push((ViolationKind::Prop1, r, RobotAction::Idle));
                    for j in (0..state.num_locations()).filter(|&j| j != here) {
                        deviations.push((ViolationKind::Prop1, r, RobotAction::Switch(j)));
                    }
                }
                RobotAction::Switch(target) if x[here] == 0 && x[target] > 0 => {
                    deviations.push((ViolationKind::Prop2, r, RobotAction::Idle));
                    for j in open_targets(state, &chosen, Some(r)) {
                        if x[j] < x[target] {
                            deviations.push((ViolationKind::Prop3, r, RobotAction::Switch(j)));
                        }
                    }
                }
                _ => {}
            }
        }
        for (kind, r, alt) in deviations {
            let variant = with_action(&chosen, r, alt);
            if !is_feasible(state, &variant) {
                continue;
            }
            let q_var = q_of(&variant).expect("feasible variants are enumerated");
            report.comparisons += 1;
            if q_var - q_chosen <= tie {
                report.violations.push(violation(kind, Some(r), &variant, q_var));
            }
        }
    }
    Ok(report)
}
