use crate::error::{Error, Result};
use crate::model::{
    admissible_robot_actions, is_feasible, stage_cost, JointAction, ModelConfig, RobotAction, SystemState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub state_budget: u64,
    /// Joint-action enumeration grows combinatorially; these bound it.
    pub max_locations: usize,
    pub max_robots: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            state_budget: 5_000_000,
            max_locations: 4,
            max_robots: 3,
        }
    }
}

/// Finite MDP with every queue capped at `cap`.
///
/// States are laid out placement-major: the index of `(s, x)` is
/// `placement(s) * (C+1)^N + sum_i x_i (C+1)^i`. Actions and transitions
/// are stored flat with offset tables.
#[derive(Debug, Clone)]
pub struct TruncatedMdp {
    config: ModelConfig,
    cap: u64,
    placements: Vec<Vec<usize>>,
    states: Vec<SystemState>,
    costs: Vec<f64>,
    action_offsets: Vec<usize>,
    actions: Vec<JointAction>,
    transition_offsets: Vec<usize>,
    transitions: Vec<(usize, f64)>,
}

/// Number of ordered placements of `m` robots on `n` distinct locations.
fn placement_count(n: usize, m: usize) -> u128 {
    (0..m).map(|k| (n - k) as u128).product()
}

fn placements(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for loc in 0..n {
            if !prefix.contains(&loc) {
                prefix.push(loc);
                extend(n, m, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

fn feasible_joint_actions(state: &SystemState) -> Vec<JointAction> {
    let per_robot: Vec<Vec<RobotAction>> = (0..state.num_robots())
        .map(|r| admissible_robot_actions(state, r))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(per_robot.len());
    fn product(
        per_robot: &[Vec<RobotAction>],
        current: &mut Vec<RobotAction>,
        state: &SystemState,
        out: &mut Vec<JointAction>,
    ) {
        if current.len() == per_robot.len() {
            let joint = JointAction(current.clone());
            if is_feasible(state, &joint) {
                out.push(joint);
            }
            return;
        }
        for &a in &per_robot[current.len()] {
            current.push(a);
            product(per_robot, current, state, out);
            current.pop();
        }
    }
    product(&per_robot, &mut current, state, &mut out);
    out
}

pub fn build_truncated_mdp(config: &ModelConfig, cap: u64) -> Result<TruncatedMdp> {
    build_truncated_mdp_with(config, cap, BuildOptions::default())
}

pub fn build_truncated_mdp_with(config: &ModelConfig, cap: u64, options: BuildOptions) -> Result<TruncatedMdp> {
    let n = config.num_locations();
    let m = config.num_robots();
    if cap == 0 {
        return Err(Error::InvalidConfig("queue cap must be positive".into()));
    }
    if n > options.max_locations || m > options.max_robots {
        return Err(Error::InvalidConfig(format!(
            "joint-action enumeration limited to N <= {} and M <= {} (got N = {n}, M = {m})",
            options.max_locations, options.max_robots
        )));
    }
    let per_placement = (cap as u128 + 1).checked_pow(n as u32).unwrap_or(u128::MAX);
    let total = placement_count(n, m).saturating_mul(per_placement);
    if total > options.state_budget as u128 {
        return Err(Error::StateSpaceTooLarge {
            states: total,
            budget: options.state_budget,
        });
    }
    let per_placement = per_placement as usize;

    let placements = placements(n, m);
    let radix = cap + 1;
    let mut states = Vec::with_capacity(total as usize);
    for placement in &placements {
        for code in 0..per_placement {
            let mut rest = code as u64;
            let queues = (0..n)
                .map(|_| {
                    let x = rest % radix;
                    rest /= radix;
                    x
                })
                .collect();
            states.push(SystemState::from_parts_unchecked(placement.clone(), queues));
        }
    }

    let mut mdp = TruncatedMdp {
        config: config.clone(),
        cap,
        placements,
        costs: states.iter().map(|s| stage_cost(s) as f64).collect(),
        states: Vec::new(),
        action_offsets: vec![0],
        actions: Vec::new(),
        transition_offsets: vec![0],
        transitions: Vec::new(),
    };

    let probs = config.arrival_probs();
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(1 << n);
    for state in &states {
        for joint in feasible_joint_actions(state) {
            let mut robots = state.robots().to_vec();
            let mut post = state.queues().to_vec();
            for (r, &act) in joint.actions().iter().enumerate() {
                match act {
                    RobotAction::Serve => post[robots[r]] -= 1,
                    RobotAction::Idle => {}
                    RobotAction::Switch(j) => robots[r] = j,
                }
            }
            let base = mdp.placement_index(&robots) * per_placement;

            row.clear();
            for pattern in 0u32..(1 << n) {
                let mut prob = 1.0;
                let mut code = 0usize;
                let mut weight = 1usize;
                for i in 0..n {
                    let arrives = pattern >> i & 1 == 1;
                    prob *= if arrives { probs[i] } else { 1.0 - probs[i] };
                    let x = if arrives && post[i] < cap { post[i] + 1 } else { post[i] };
                    code += x as usize * weight;
                    weight *= radix as usize;
                }
                if prob > 0.0 {
                    row.push((base + code, prob));
                }
            }
            // Arrivals dropped at the cap map several patterns onto one
            // successor; merge them.
            row.sort_by_key(|&(idx, _)| idx);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(idx, p) in &row {
                match merged.last_mut() {
                    Some(last) if last.0 == idx => last.1 += p,
                    _ => merged.push((idx, p)),
                }
            }
            mdp.transitions.extend_from_slice(&merged);
            mdp.transition_offsets.push(mdp.transitions.len());
            mdp.actions.push(joint);
        }
        mdp.action_offsets.push(mdp.actions.len());
    }
    mdp.states = states;
    Ok(mdp)
}

impl TruncatedMdp {
    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[SystemState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &SystemState {
        &self.states[index]
    }

    pub fn cost(&self, index: usize) -> f64 {
        self.costs[index]
    }

    fn placement_index(&self, robots: &[usize]) -> usize {
        // Placements are generated in lexicographic order.
        self.placements
            .binary_search_by(|p| p.as_slice().cmp(robots))
            .expect("robots sit on distinct locations")
    }

    pub fn index_of(&self, state: &SystemState) -> Option<usize> {
        if state.num_locations() != self.config.num_locations()
            || state.num_robots() != self.config.num_robots()
            || state.queues().iter().any(|&x| x > self.cap)
        {
            return None;
        }
        let radix = self.cap as usize + 1;
        let per_placement = radix.pow(self.config.num_locations() as u32);
        let code = state
            .queues()
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * radix + x as usize);
        Some(self.placement_index(state.robots()) * per_placement + code)
    }

    /// Range of action slots belonging to `state`.
    pub fn action_range(&self, state: usize) -> std::ops::Range<usize> {
        self.action_offsets[state]..self.action_offsets[state + 1]
    }

    pub fn action(&self, slot: usize) -> &JointAction {
        &self.actions[slot]
    }

    pub fn actions_of(&self, state: usize) -> &[JointAction] {
        &self.actions[self.action_range(state)]
    }

    /// `(next state, probability)` pairs for an action slot.
    pub fn transitions(&self, slot: usize) -> &[(usize, f64)] {
        &self.transitions[self.transition_offsets[slot]..self.transition_offsets[slot + 1]]
    }

    pub fn action_slot(&self, state: usize, joint: &JointAction) -> Option<usize> {
        self.action_range(state).find(|&slot| &self.actions[slot] == joint)
    }

    /// Every queue at most `cap - margin`.
    pub fn is_interior(&self, state: usize, margin: u64) -> bool {
        let limit = self.cap.saturating_sub(margin);
        self.states[state].queues().iter().all(|&x| x <= limit)
    }
}
