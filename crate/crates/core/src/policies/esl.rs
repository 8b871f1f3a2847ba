use crate::model::{JointAction, RobotAction, SystemState};

#[derive(Clone, Copy)]
enum TargetOrder {
    Longest,
    Shortest,
}

/// Exhaustive-Serve-Longest.
///
/// Robots at nonempty locations serve. The remaining robots, taken in
/// increasing index, each switch to the longest nonempty location that no
/// robot is standing on and no earlier robot has claimed (ties go to the
/// lower location index). Robots left without a target idle.
pub fn esl_decide(state: &SystemState) -> JointAction {
    assign(state, TargetOrder::Longest)
}

/// ESL with the destination order reversed: free robots go to the
/// shortest nonempty unoccupied location. Strictly suboptimal whenever two
/// candidate lengths differ; used as a mutation to exercise the oracle.
pub fn shortest_switch_decide(state: &SystemState) -> JointAction {
    assign(state, TargetOrder::Shortest)
}

fn assign(state: &SystemState, order: TargetOrder) -> JointAction {
    let queues = state.queues();
    let mut hosted = vec![false; state.num_locations()];
    for &loc in state.robots() {
        hosted[loc] = true;
    }

    // A free robot stands on an empty location, so "no robot on it" already
    // excludes every location where someone serves or idles this slot.
    let mut targets: Vec<usize> = (0..queues.len()).filter(|&i| queues[i] > 0 && !hosted[i]).collect();
    match order {
        TargetOrder::Longest => targets.sort_by(|&a, &b| queues[b].cmp(&queues[a]).then(a.cmp(&b))),
        TargetOrder::Shortest => targets.sort_by(|&a, &b| queues[a].cmp(&queues[b]).then(a.cmp(&b))),
    }
    let mut targets = targets.into_iter();

    let actions = (0..state.num_robots())
        .map(|r| {
            if state.queue_at_robot(r) > 0 {
                RobotAction::Serve
            } else {
                targets.next().map_or(RobotAction::Idle, RobotAction::Switch)
            }
        })
        .collect();
    JointAction(actions)
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
    fn serves_in_place_and_sends_free_robot_to_longest() {
        let s = st(&[1, 2], &[0, 4, 7, 2, 0, 0]);
        assert_eq!(esl_decide(&s).0, vec![Switch(2), Serve]);
    }

    #[test]
    fn all_idle_when_nothing_waits() {
        let s = st(&[1, 2], &[0; 6]);
        assert_eq!(esl_decide(&s).0, vec![Idle, Idle]);
    }

    #[test]
    fn ties_go_to_lower_location_for_lower_robot() {
        let s = st(&[1, 2, 3], &[0, 0, 0, 5, 5, 1]);
        assert_eq!(esl_decide(&s).0, vec![Switch(3), Switch(4), Switch(5)]);
    }

    #[test]
    fn never_targets_a_served_location() {
        // Location 2 is longest but robot 2 is already serving it.
        let s = st(&[1, 2], &[0, 9, 3]);
        let j = esl_decide(&s);
        assert_eq!(j.0, vec![Switch(2), Serve]);
        assert!(is_feasible(&s, &j));
    }

    #[test]
    fn extra_free_robots_idle() {
        let s = st(&[1, 2, 3], &[0, 0, 0, 1]);
        assert_eq!(esl_decide(&s).0, vec![Switch(3), Idle, Idle]);
    }

    #[test]
    fn mutation_picks_shortest() {
        let s = st(&[1], &[0, 2, 1]);
        assert_eq!(shortest_switch_decide(&s).0, vec![Switch(2)]);
        assert_eq!(esl_decide(&s).0, vec![Switch(1)]);
    }
}
