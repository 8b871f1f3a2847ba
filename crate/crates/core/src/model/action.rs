use std::fmt;

/// What a single robot does during one slot.
///
/// `Switch(j)` carries a zero-based destination that differs from the
/// robot's current location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RobotAction {
    Serve,
    Idle,
    Switch(usize),
}

/// Coarse action category used for action-time fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionClass {
    Serve,
    Switch,
    Idle,
}

impl RobotAction {
    pub fn class(self) -> ActionClass {
        match self {
            RobotAction::Serve => ActionClass::Serve,
            RobotAction::Idle => ActionClass::Idle,
            RobotAction::Switch(_) => ActionClass::Switch,
        }
    }

    /// Serve and idle both keep the robot where it is.
    pub fn stays(self) -> bool {
        !matches!(self, RobotAction::Switch(_))
    }
}

impl fmt::Display for RobotAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobotAction::Serve => f.write_str("serve"),
            RobotAction::Idle => f.write_str("idle"),
            RobotAction::Switch(j) => write!(f, "switch({})", j + 1),
        }
    }
}

/// One action per robot, in robot order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointAction(pub Vec<RobotAction>);

impl JointAction {
    pub fn all_idle(num_robots: usize) -> Self {
        JointAction(vec![RobotAction::Idle; num_robots])
    }

    pub fn actions(&self) -> &[RobotAction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Relabel locations `a` and `b` in every switch destination.
    pub fn swap_locations(&self, a: usize, b: usize) -> Self {
        JointAction(
            self.0
                .iter()
                .map(|act| match *act {
                    RobotAction::Switch(j) if j == a => RobotAction::Switch(b),
                    RobotAction::Switch(j) if j == b => RobotAction::Switch(a),
                    other => other,
                })
                .collect(),
        )
    }
}

impl From<Vec<RobotAction>> for JointAction {
    fn from(v: Vec<RobotAction>) -> Self {
        JointAction(v)
    }
}

impl fmt::Display for JointAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}
