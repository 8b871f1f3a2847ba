use crate::error::{Error, Result};
use crate::model::{JointAction, RobotAction, SystemState};

/// Where a cyclic robot is within its block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicCursor {
    /// Index into the robot's block of the location it occupies or is
    /// travelling to.
    pub position: usize,
    /// Dwell slots left at the current location.
    pub remaining: u32,
}

/// Static partition of locations into per-robot blocks plus each robot's
/// cursor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicPlan {
    blocks: Vec<Vec<usize>>,
    dwell: u32,
    cursors: Vec<CyclicCursor>,
}

impl CyclicPlan {
    /// Contiguous blocks, robot `r` owning the `r`-th. When `M` does not
    /// divide `N` the first `N mod M` blocks get one extra location.
    pub fn new(num_locations: usize, num_robots: usize, dwell: u32) -> Result<Self> {
        if num_robots == 0 || num_robots > num_locations {
            return Err(Error::InvalidConfig(format!(
                "cannot partition {num_locations} locations among {num_robots} robots"
            )));
        }
        if dwell == 0 {
            return Err(Error::InvalidConfig("cyclic dwell must be positive".into()));
        }
        let base = num_locations / num_robots;
        let extra = num_locations % num_robots;
        let mut blocks = Vec::with_capacity(num_robots);
        let mut start = 0;
        for r in 0..num_robots {
            let size = base + usize::from(r < extra);
            blocks.push((start..start + size).collect());
            start += size;
        }
        let cursors = vec![
            CyclicCursor {
                position: 0,
                remaining: dwell,
            };
            num_robots
        ];
        Ok(Self { blocks, dwell, cursors })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn dwell(&self) -> u32 {
        self.dwell
    }

    pub fn cursors(&self) -> &[CyclicCursor] {
        &self.cursors
    }

    /// Largest block size, the `n` used for dwell optimization.
    pub fn locations_per_robot(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Each robot at the first location of its block, queues empty.
    pub fn initial_state(&self) -> SystemState {
        let n = self.blocks.iter().map(Vec::len).sum();
        SystemState::from_parts_unchecked(self.blocks.iter().map(|b| b[0]).collect(), vec![0; n])
    }
}

/// Serve (or idle when empty) while dwell remains, then move to the next
/// location of the block. The travel slot does not consume dwell.
///
/// Uses nothing but the robot's own cursor and whether its current
/// location is empty.
pub fn cyclic_decide(state: &SystemState, plan: &CyclicPlan) -> (JointAction, CyclicPlan) {
    let mut next = plan.clone();
    let actions = next
        .cursors
        .iter_mut()
        .zip(&plan.blocks)
        .enumerate()
        .map(|(r, (cursor, block))| {
            debug_assert_eq!(state.location_of(r), block[cursor.position]);
            let stay = if state.queue_at_robot(r) > 0 {
                RobotAction::Serve
            } else {
                RobotAction::Idle
            };
            if block.len() == 1 {
                return stay;
            }
            if cursor.remaining > 0 {
                cursor.remaining -= 1;
                stay
            } else {
                cursor.position = (cursor.position + 1) % block.len();
                cursor.remaining = plan.dwell;
                RobotAction::Switch(block[cursor.position])
            }
        })
        .collect();
    (JointAction(actions), next)
}
