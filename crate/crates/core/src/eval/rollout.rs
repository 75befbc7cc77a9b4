use super::{EvalError, TaskSuite};
use crate::data::StateEncoder;
use crate::expert::{expert_action, plan_path, ExpertConfig};
use crate::nn::{Checkpoint, GaussianPolicy, NetKind};
use crate::offrl::CheckpointMeta;
use crate::rng::{domain, stream};
use crate::sim::{Action, Episode, NavState, Point, Pose, RobotSpec, Terminal, World};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Per-trial start perturbation bounds (m, rad).
pub const JITTER_POS: f64 = 0.1;
pub const JITTER_MARGIN: f64 = 0.1;
pub const JITTER_HEADING: f64 = 0.1;
const JITTER_ATTEMPTS: usize = 100;

/// Anything that maps observations to velocity commands.
pub trait Controller: Sync {
    fn name(&self) -> String;

    /// Per-task setup; only privileged controllers use the returned plan.
    fn prepare(&self, _world: &World, _start: &Pose, _goal: Point) -> Result<Option<Vec<Point>>, EvalError> {
        Ok(None)
    }

    fn act(&self, state: &NavState, pose: &Pose, plan: Option<&[Point]>) -> Result<Action, EvalError>;
}

/// Deterministic policy: the squashed Gaussian mean.
#[derive(Debug, Clone)]
pub struct PolicyController {
    pub label: String,
    pub policy: GaussianPolicy<f32>,
    pub encoder: StateEncoder,
}

impl PolicyController {
    pub fn new(label: impl Into<String>, policy: GaussianPolicy<f32>, encoder: StateEncoder) -> Result<Self, EvalError> {
        let (expected, found) = (policy.arch.input_dim(), encoder.dim());
        if expected != found {
            return Err(EvalError::Shape { expected, found });
        }
        Ok(Self { label: label.into(), policy, encoder })
    }

    /// Rebuilds the policy and its encoder from a training checkpoint.
    pub fn from_checkpoint(ck: &Checkpoint<f32>, spec: &RobotSpec) -> Result<Self, EvalError> {
        let meta = CheckpointMeta::parse(&ck.meta)?;
        let net = ck.net("policy").filter(|n| n.kind == NetKind::Gaussian).ok_or_else(|| EvalError::Config("checkpoint has no Gaussian `policy` net".into()))?;
        if meta.encoder.beam_count != spec.lidar_beam_count {
            return Err(EvalError::Shape { expected: meta.encoder.beam_count + 4, found: spec.lidar_beam_count + 4 });
        }
        let policy = GaussianPolicy::from_params(net.arch.clone(), net.params.clone(), net.action_scale)?;
        Self::new(meta.trainer.method.label(), policy, meta.encoder)
    }
}

impl Controller for PolicyController {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn act(&self, state: &NavState, _pose: &Pose, _plan: Option<&[Point]>) -> Result<Action, EvalError> {
        let x = self.encoder.encode(state).map_err(|e| EvalError::Config(e.to_string()))?;
        let [v, w] = self.policy.mode(&x, 1)?[0];
        Ok(Action { v_cmd: v, omega_cmd: w })
    }
}

/// The scripted demonstrator, re-planning from each task's start.
#[derive(Debug, Clone, Copy)]
pub struct ExpertController {
    pub cfg: ExpertConfig,
    pub spec: RobotSpec,
}

impl Controller for ExpertController {
    fn name(&self) -> String {
        "Expert".into()
    }

    fn prepare(&self, world: &World, start: &Pose, goal: Point) -> Result<Option<Vec<Point>>, EvalError> {
        // jittered starts may sit inside the inflated margin; retry with the bare radius
        let plan = plan_path(world, start.position(), goal, self.spec.radius + self.cfg.inflation)
            .or_else(|_| plan_path(world, start.position(), goal, self.spec.radius))?;
        Ok(Some(plan))
    }

    fn act(&self, _state: &NavState, pose: &Pose, plan: Option<&[Point]>) -> Result<Action, EvalError> {
        let path = plan.ok_or_else(|| EvalError::Protocol("expert controller used without a plan".into()))?;
        Ok(expert_action(pose, path, &self.cfg, &self.spec)?)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroController;

impl Controller for ZeroController {
    fn name(&self) -> String {
        "Zero".into()
    }

    fn act(&self, _: &NavState, _: &Pose, _: Option<&[Point]>) -> Result<Action, EvalError> {
        Ok(Action::default())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantController(pub Action);

impl Controller for ConstantController {
    fn name(&self) -> String {
        format!("Constant({}, {})", self.0.v_cmd, self.0.omega_cmd)
    }

    fn act(&self, _: &NavState, _: &Pose, _: Option<&[Point]>) -> Result<Action, EvalError> {
        Ok(self.0)
    }
}

/// One executed episode: every pose with the velocities held at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rollout {
    pub start: Pose,
    pub goal: Point,
    pub terminal: Terminal,
    pub poses: Vec<Pose>,
    /// `(v, ω)` of the observation at each pose.
    pub velocities: Vec<[f64; 2]>,
}

impl Rollout {
    pub fn steps(&self) -> usize {
        self.poses.len() - 1
    }
}

pub fn rollout<C: Controller + ?Sized>(
    controller: &C,
    world: &World,
    spec: &RobotSpec,
    suite: &TaskSuite,
    start: Pose,
    goal: Point,
) -> Result<Rollout, EvalError> {
    let plan = controller.prepare(world, &start, goal)?;
    let mut ep = Episode::new(world, *spec, suite.episode, start, goal)?;
    let mut poses = vec![start];
    let mut velocities = vec![[ep.state().lin_vel, ep.state().ang_vel]];
    loop {
        let action = controller.act(ep.state(), ep.pose(), plan.as_deref())?;
        let out = ep.step(&action)?;
        poses.push(*ep.pose());
        velocities.push([out.next_state.lin_vel, out.next_state.ang_vel]);
        if out.terminal.is_terminal() {
            return Ok(Rollout { start, goal, terminal: out.terminal, poses, velocities });
        }
    }
}

/// Start pose perturbed uniformly by ±0.1 m / ±0.1 rad, redrawn until the
/// robot disk is free; falls back to the nominal start.
pub fn jittered_start(world: &World, spec: &RobotSpec, start: Pose, seed: u64, trial: u64, task: u64) -> Pose {
    // never closer to obstacles than the nominal start or radius + margin
    let required = world.clearance(start.position()).min(spec.radius + JITTER_MARGIN);
    let mut rng = stream(seed, domain::JITTER, (trial << 32) | task);
    for _ in 0..JITTER_ATTEMPTS {
        let p = Pose::new(
            start.x + rng.gen_range(-JITTER_POS..=JITTER_POS),
            start.y + rng.gen_range(-JITTER_POS..=JITTER_POS),
            start.heading + rng.gen_range(-JITTER_HEADING..=JITTER_HEADING),
        );
        if world.inside_bounds(p.position()) && world.clearance(p.position()) >= required {
            return p;
        }
    }
    start
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub trials: usize,
    pub jitter: bool,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { trials: 3, jitter: true, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return Self::default();
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

/// `(SR, CR, TR)` in percent.
pub fn rates(outcomes: &[Terminal]) -> (f64, f64, f64) {
    let n = outcomes.len().max(1) as f64;
    let count = |t: Terminal| outcomes.iter().filter(|&&o| o == t).count() as f64;
    (100.0 * count(Terminal::Success) / n, 100.0 * count(Terminal::Collision) / n, 100.0 * count(Terminal::Timeout) / n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub outcomes: Vec<Terminal>,
    pub sr: f64,
    pub cr: f64,
    pub tr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub method: String,
    pub world: String,
    pub suite_digest: String,
    pub options: EvalOptions,
    pub trials: Vec<TrialSummary>,
    pub sr: MeanStd,
    pub cr: MeanStd,
    pub tr: MeanStd,
    /// Rollouts of every task, trial by trial.
    pub rollouts: Vec<Vec<Rollout>>,
}

impl EvalResult {
    pub fn count(&self, trial: usize, terminal: Terminal) -> usize {
        self.trials[trial].outcomes.iter().filter(|&&o| o == terminal).count()
    }
}

/// Runs every task of `suite` for `opts.trials` trials; tasks run in
/// parallel and are reduced in task order.
pub fn evaluate_suite<C: Controller + ?Sized>(
    controller: &C,
    world: &World,
    spec: &RobotSpec,
    suite: &TaskSuite,
    opts: &EvalOptions,
) -> Result<EvalResult, EvalError> {
    if opts.trials == 0 {
        return Err(EvalError::Config("at least one trial is required".into()));
    }
    suite.validate(world, spec.radius)?;
    let mut trials = Vec::with_capacity(opts.trials);
    let mut rollouts = Vec::with_capacity(opts.trials);
    for trial in 0..opts.trials {
        let runs = suite
            .tasks
            .par_iter()
            .enumerate()
            .map(|(i, task)| {
                let start = if opts.jitter { jittered_start(world, spec, task.start, opts.seed, trial as u64, i as u64) } else { task.start };
                rollout(controller, world, spec, suite, start, task.goal)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let outcomes: Vec<Terminal> = runs.iter().map(|r| r.terminal).collect();
        let (sr, cr, tr) = rates(&outcomes);
        trials.push(TrialSummary { outcomes, sr, cr, tr });
        rollouts.push(runs);
    }
    let pick = |f: fn(&TrialSummary) -> f64| MeanStd::of(&trials.iter().map(f).collect::<Vec<_>>());
    Ok(EvalResult {
        method: controller.name(),
        world: world.name.clone(),
        suite_digest: suite.digest(),
        options: *opts,
        sr: pick(|t| t.sr),
        cr: pick(|t| t.cr),
        tr: pick(|t| t.tr),
        trials,
        rollouts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_partition_counts() {
        let mut o = vec![Terminal::Success; 47];
        o.extend([Terminal::Collision; 2]);
        o.push(Terminal::Timeout);
        let (sr, cr, tr) = rates(&o);
        assert_eq!((sr, cr, tr), (94.0, 4.0, 2.0));
        assert_eq!(sr + cr + tr, 100.0);
    }

    #[test]
    fn population_std() {
        let m = MeanStd::of(&[1.0, 3.0]);
        assert_eq!((m.mean, m.std), (2.0, 1.0));
    }
}
