//! PointNav episodes: termination rules, path accounting and SPL.

mod suite;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{Agent, AgentInput, NavMap};
use crate::backend::{Action, Backend, BackendError};
use crate::geometry::{GeometryError, Pose, Scene, Vec2};

pub(crate) use suite::mean_and_se;
pub use suite::{
    run_suite, BackendConfig, Configuration, EpisodeKey, EpisodeRecord, EvalResult, ScenarioSuite,
    LEGS_PER_CONFIGURATION,
};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("invalid episode: {0}")]
    InvalidEpisode(String),
    #[error("invalid suite: {0}")]
    InvalidSuite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_steps: u32,
    pub max_collisions: u32,
    pub success_radius: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_steps: 200,
            max_collisions: 40,
            success_radius: 0.2,
        }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<(), TaskError> {
        if self.max_steps == 0
            || self.max_collisions == 0
            || !(self.success_radius > 0.0)
            || !self.success_radius.is_finite()
        {
            return Err(TaskError::InvalidArgument(format!("limits must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// One spawn-to-goal episode with its precomputed geodesic length.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSpec {
    pub scene: String,
    pub start: Pose,
    pub goal: Vec2,
    pub geodesic_l: f64,
}

impl EpisodeSpec {
    /// Builds a spec, computing the geodesic with the map's visibility graph.
    pub fn new(map: &NavMap, start: Pose, goal: Vec2) -> Result<Self, TaskError> {
        let graph = map
            .graph()
            .ok_or_else(|| TaskError::InvalidEpisode("scene has no navigation graph".into()))?;
        let geodesic_l = graph.distance(start.position, goal)?;
        let spec = Self {
            scene: map.scene().name().to_string(),
            start,
            goal,
            geodesic_l,
        };
        spec.validate(map.scene(), map.radius())?;
        Ok(spec)
    }

    pub fn validate(&self, scene: &Scene, radius: f64) -> Result<(), TaskError> {
        for (what, p) in [("start", self.start.position), ("goal", self.goal)] {
            if !scene.is_navigable(p, radius) {
                return Err(TaskError::InvalidEpisode(format!(
                    "{what} ({:.3}, {:.3}) is not navigable in '{}'",
                    p.x,
                    p.y,
                    scene.name()
                )));
            }
        }
        if !(self.geodesic_l > 0.0) || !self.geodesic_l.is_finite() {
            return Err(TaskError::InvalidEpisode(format!(
                "geodesic length must be finite and positive, got {}",
                self.geodesic_l
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    StoppedSuccess,
    StoppedFailure,
    StepLimit,
    CollisionLimit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StoppedSuccess => "stopped_success",
            Termination::StoppedFailure => "stopped_failure",
            Termination::StepLimit => "step_limit",
            Termination::CollisionLimit => "collision_limit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Termination::StoppedSuccess,
            Termination::StoppedFailure,
            Termination::StepLimit,
            Termination::CollisionLimit,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub success: bool,
    pub path_length: f64,
    pub geodesic_l: f64,
    pub spl: f64,
    pub steps: u32,
    pub collisions: u32,
    pub termination: Termination,
    /// True poses: the start pose followed by the pose after every action.
    pub trajectory: Vec<Pose>,
    /// Set when the policy produced something that is not an action.
    pub protocol_error: Option<String>,
}

/// `S · l / max(p, l)`.
pub fn compute_spl(success: bool, p: f64, l: f64) -> Result<f64, TaskError> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(TaskError::InvalidArgument(format!("l must be positive, got {l}")));
    }
    if !(p >= 0.0) {
        return Err(TaskError::InvalidArgument(format!("p must be non-negative, got {p}")));
    }
    Ok(if success { l / p.max(l) } else { 0.0 })
}

/// Anything that can pick an action; a failure is a protocol error.
pub trait Policy {
    fn choose(&mut self, input: &AgentInput<'_>) -> Result<Action, String>;
}

impl<T: Agent + ?Sized> Policy for T {
    fn choose(&mut self, input: &AgentInput<'_>) -> Result<Action, String> {
        Ok(self.act(input))
    }
}

/// Runs one episode until the policy stops or a limit is hit.
///
/// Path length sums the straight-line hops between consecutive true
/// positions, and success is judged on the true position.
pub fn run_episode<P: Policy + ?Sized>(
    backend: &mut Backend,
    policy: &mut P,
    map: &NavMap,
    spec: &EpisodeSpec,
    limits: &Limits,
    episode_id: u64,
) -> Result<EpisodeOutcome, TaskError> {
    limits.validate()?;
    spec.validate(backend.scene(), backend.radius())?;
    let mut observation = backend.reset(spec.start, spec.goal, episode_id)?;
    let mut pose = spec.start;
    let mut trajectory = vec![pose];
    let mut path_length = 0.0;
    let mut steps = 0;
    let mut collisions = 0;
    let mut protocol_error = None;

    let termination = loop {
        if steps >= limits.max_steps {
            break Termination::StepLimit;
        }
        let input = AgentInput {
            observation: &observation,
            map,
            pose,
            goal: spec.goal,
        };
        let action = match policy.choose(&input) {
            Ok(a) => a,
            Err(e) => {
                protocol_error = Some(e);
                break Termination::StoppedFailure;
            }
        };
        steps += 1;
        let (next, collided) = backend.step(action)?;
        let now = backend.pose().ok_or(BackendError::NotReset)?;
        path_length += pose.position.distance(now.position);
        pose = now;
        trajectory.push(pose);
        observation = next;
        if action == Action::Stop {
            break if pose.position.distance(spec.goal) <= limits.success_radius {
                Termination::StoppedSuccess
            } else {
                Termination::StoppedFailure
            };
        }
        if collided {
            collisions += 1;
            if collisions > limits.max_collisions {
                break Termination::CollisionLimit;
            }
        }
    };

    let success = termination == Termination::StoppedSuccess;
    Ok(EpisodeOutcome {
        success,
        path_length,
        geodesic_l: spec.geodesic_l,
        spl: compute_spl(success, path_length, spec.geodesic_l)?,
        steps,
        collisions,
        termination,
        trajectory,
        protocol_error,
    })
}
