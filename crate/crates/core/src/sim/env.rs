use super::{
    normalize_angle, raycast, step_kinematics, Action, EpisodeConfig, NavState, Point, Pose, RobotSpec, SimError,
    World,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    None,
    Success,
    Collision,
    Timeout,
}

impl Terminal {
    pub fn is_terminal(self) -> bool {
        self != Terminal::None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next_state: NavState,
    pub reward: f64,
    pub terminal: Terminal,
}

/// Goal distance and bearing in the robot frame.
pub fn relative_goal(pose: &Pose, goal: Point) -> (f64, f64) {
    let dx = goal.x - pose.x;
    let dy = goal.y - pose.y;
    (dx.hypot(dy), normalize_angle(dy.atan2(dx) - pose.heading))
}

pub(crate) fn observe(world: &World, spec: &RobotSpec, pose: &Pose, goal: Point, action: Action) -> Result<NavState, SimError> {
    // The centre can only leave the room on an already-colliding step.
    let probe = Pose {
        x: pose.x.clamp(0.0, world.width),
        y: pose.y.clamp(0.0, world.height),
        heading: pose.heading,
    };
    let scan = raycast(world, &probe, spec)?;
    let (goal_dist, goal_bearing) = relative_goal(pose, goal);
    Ok(NavState { scan, goal_dist, goal_bearing, lin_vel: action.v_cmd, ang_vel: action.omega_cmd })
}

/// One control tick: clamp, integrate, classify and reward.
///
/// Success is tested before collision. A step that ends at `t + 1 == t_max`
/// with neither event is a timeout and still receives the dense reward.
pub fn step_env(
    world: &World,
    spec: &RobotSpec,
    cfg: &EpisodeConfig,
    pose: &Pose,
    goal: Point,
    action: &Action,
    t: usize,
) -> Result<(StepOutcome, Pose), SimError> {
    if t >= cfg.t_max {
        return Err(SimError::Protocol(format!("step index {t} at or beyond horizon {}", cfg.t_max)));
    }
    let cmd = action.clamped(spec);
    let next = step_kinematics(pose, &cmd, spec.control_dt)?;
    let d_before = pose.position().dist(&goal);
    let d_after = next.position().dist(&goal);
    let (reward, terminal) = if d_after <= cfg.goal_radius {
        (cfg.r_success, Terminal::Success)
    } else if world.capsule_collides(pose.position(), next.position(), spec.radius) {
        (cfg.r_collision, Terminal::Collision)
    } else {
        let dense = cfg.c1 * (d_before - d_after);
        (dense, if t + 1 == cfg.t_max { Terminal::Timeout } else { Terminal::None })
    };
    let next_state = observe(world, spec, &next, goal, cmd)?;
    Ok((StepOutcome { next_state, reward, terminal }, next))
}

/// Single-owner episode engine enforcing the step protocol.
#[derive(Debug, Clone)]
pub struct Episode<'w> {
    world: &'w World,
    spec: RobotSpec,
    cfg: EpisodeConfig,
    goal: Point,
    pose: Pose,
    state: NavState,
    t: usize,
    terminal: Terminal,
}

impl<'w> Episode<'w> {
    pub fn new(world: &'w World, spec: RobotSpec, cfg: EpisodeConfig, start: Pose, goal: Point) -> Result<Self, SimError> {
        spec.validate()?;
        cfg.validate()?;
        if !(goal.x.is_finite() && goal.y.is_finite()) {
            return Err(SimError::NonFinite("goal"));
        }
        let state = observe(world, &spec, &start, goal, Action::default())?;
        Ok(Self { world, spec, cfg, goal, pose: start, state, t: 0, terminal: Terminal::None })
    }

    pub fn state(&self) -> &NavState {
        &self.state
    }

    pub fn pose(&self) -> &Pose {
        &self.pose
    }

    pub fn goal(&self) -> Point {
        self.goal
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn terminal(&self) -> Terminal {
        self.terminal
    }

    pub fn world(&self) -> &'w World {
        self.world
    }

    pub fn step(&mut self, action: &Action) -> Result<StepOutcome, SimError> {
        if self.terminal.is_terminal() {
            return Err(SimError::Protocol(format!("step after terminal {:?}", self.terminal)));
        }
        let (out, pose) = step_env(self.world, &self.spec, &self.cfg, &self.pose, self.goal, action, self.t)?;
        self.t += 1;
        self.pose = pose;
        self.state = out.next_state.clone();
        self.terminal = out.terminal;
        Ok(out)
    }
}
