//! Interchangeable simulation backends behind one observation/action surface.
//!
//! `test_sim` applies [`SimParams`] verbatim. `reference_real` stands in for
//! the physical robot: it keeps only the sensor layout from the supplied
//! parameters and applies a fixed [`ReferenceProfile`] for everything else.

mod noise;

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{resolve_move, CollisionMode, GeometryError, Pose, Scene, Vec2};
use crate::rng;

pub use noise::{
    nominal_motion, sample_displacement, ActionNoise, ActuationNoiseModel, Motion, FORWARD_STEP, TURN_ANGLE,
};

/// Disc radius of the simulated robot body in meters.
pub const AGENT_RADIUS: f64 = 0.175;
// Depth readings never reach exactly zero.
const MIN_DEPTH: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("backend has not been reset onto an episode")]
    NotReset,
    #[error("step called after the episode was stopped")]
    StepAfterStop,
    #[error("invalid simulator parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Discrete action space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    TurnLeft,
    TurnRight,
    Forward,
    Stop,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::TurnLeft, Action::TurnRight, Action::Forward, Action::Stop];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::TurnLeft => "turn_left",
            Action::TurnRight => "turn_right",
            Action::Forward => "forward",
            Action::Stop => "stop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendId {
    TestSim,
    ReferenceReal,
}

impl BackendId {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendId::TestSim => "test_sim",
            BackendId::ReferenceReal => "reference_real",
        }
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "test_sim" => Ok(BackendId::TestSim),
            "reference_real" => Ok(BackendId::ReferenceReal),
            other => Err(format!(
                "unknown backend '{other}' (expected test_sim or reference_real)"
            )),
        }
    }
}

fn default_rays() -> usize {
    64
}
fn default_fov() -> f64 {
    FRAC_PI_4
}
fn default_depth_clip() -> f64 {
    10.0
}
fn default_sliding() -> bool {
    true
}

/// Tunable simulator knobs (the optimization variable of the grid search).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    #[serde(default = "default_sliding")]
    pub sliding: bool,
    #[serde(default)]
    pub noise_multiplier: f64,
    #[serde(default)]
    pub depth_noise_sigma: f64,
    #[serde(default)]
    pub localization_sigma: f64,
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default = "default_fov")]
    pub fov: f64,
    #[serde(default = "default_depth_clip")]
    pub depth_clip: f64,
    #[serde(default)]
    pub actuation: ActuationNoiseModel,
}

impl Default for SimParams {
    /// Challenge-style settings: sliding on, no noise.
    fn default() -> Self {
        Self {
            sliding: true,
            noise_multiplier: 0.0,
            depth_noise_sigma: 0.0,
            localization_sigma: 0.0,
            rays: default_rays(),
            fov: default_fov(),
            depth_clip: default_depth_clip(),
            actuation: ActuationNoiseModel::default(),
        }
    }
}

impl SimParams {
    pub fn with_sliding(mut self, sliding: bool) -> Self {
        self.sliding = sliding;
        self
    }

    pub fn with_noise(mut self, multiplier: f64) -> Self {
        self.noise_multiplier = multiplier;
        self
    }

    pub fn collision_mode(&self) -> CollisionMode {
        if self.sliding {
            CollisionMode::Slide
        } else {
            CollisionMode::Stop
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        let bad = |m: String| Err(BackendError::InvalidParams(m));
        if !(0.0..=1.0).contains(&self.noise_multiplier) {
            return bad(format!("noise_multiplier {} not in [0, 1]", self.noise_multiplier));
        }
        if !(self.depth_noise_sigma >= 0.0) || !self.depth_noise_sigma.is_finite() {
            return bad("depth_noise_sigma must be >= 0".into());
        }
        if !(self.localization_sigma >= 0.0) || !self.localization_sigma.is_finite() {
            return bad("localization_sigma must be >= 0".into());
        }
        if self.rays == 0 {
            return bad("rays must be positive".into());
        }
        if !(self.fov > 0.0 && self.fov <= std::f64::consts::TAU) {
            return bad(format!("fov {} not in (0, 2pi]", self.fov));
        }
        if !(self.depth_clip > 0.0) || !self.depth_clip.is_finite() {
            return bad("depth_clip must be positive".into());
        }
        self.actuation.validate().map_err(BackendError::InvalidParams)
    }
}

/// Fixed settings of the reality stand-in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    pub sliding: bool,
    pub noise_multiplier: f64,
    pub depth_noise_sigma: f64,
    pub localization_sigma: f64,
    pub actuation: ActuationNoiseModel,
}

impl Default for ReferenceProfile {
    fn default() -> Self {
        Self {
            sliding: false,
            noise_multiplier: 0.3,
            depth_noise_sigma: 0.02,
            localization_sigma: 0.07,
            actuation: ActuationNoiseModel::default(),
        }
    }
}

impl ReferenceProfile {
    /// Effective parameters: the profile plus the caller's sensor layout.
    pub fn apply(&self, sensor: &SimParams) -> SimParams {
        SimParams {
            sliding: self.sliding,
            noise_multiplier: self.noise_multiplier,
            depth_noise_sigma: self.depth_noise_sigma,
            localization_sigma: self.localization_sigma,
            rays: sensor.rays,
            fov: sensor.fov,
            depth_clip: sensor.depth_clip,
            actuation: self.actuation,
        }
    }
}

/// Egocentric observation: a depth fan plus the goal in polar coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Range readings, leftmost ray first.
    pub depth: Vec<f64>,
    pub goal_distance: f64,
    /// Goal bearing relative to the heading, in `(-π, π]`, positive to the left.
    pub goal_azimuth: f64,
    /// Field of view spanned by `depth`.
    pub fov: f64,
}

impl Observation {
    /// Bearing (relative to heading) of ray `i`.
    pub fn ray_angle(&self, i: usize) -> f64 {
        ray_offset(i, self.depth.len(), self.fov)
    }

    /// Smallest reading among rays within `half_width` of straight ahead.
    pub fn min_depth_within(&self, half_width: f64) -> f64 {
        let ahead = (0..self.depth.len())
            .filter(|&i| self.ray_angle(i).abs() <= half_width + 1e-12)
            .map(|i| self.depth[i])
            .fold(f64::INFINITY, f64::min);
        if ahead.is_finite() {
            ahead
        } else {
            self.center_depth()
        }
    }

    /// Reading of the ray closest to the heading (minimum of the two
    /// central rays when the count is even).
    pub fn center_depth(&self) -> f64 {
        let n = self.depth.len();
        if n % 2 == 1 {
            self.depth[n / 2]
        } else {
            self.depth[n / 2 - 1].min(self.depth[n / 2])
        }
    }

    /// Index of the ray whose bearing is closest to `angle`, if within the
    /// field of view.
    pub fn ray_toward(&self, angle: f64) -> Option<usize> {
        if angle.abs() > self.fov / 2.0 + 1e-12 {
            return None;
        }
        (0..self.depth.len()).min_by(|&a, &b| {
            (self.ray_angle(a) - angle)
                .abs()
                .total_cmp(&(self.ray_angle(b) - angle).abs())
        })
    }
}

fn ray_offset(i: usize, n: usize, fov: f64) -> f64 {
    if n <= 1 {
        0.0
    } else {
        fov / 2.0 - fov * i as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone)]
struct EpisodeState {
    pose: Pose,
    goal: Vec2,
    stopped: bool,
}

/// A single-owner simulation handle. Reset it onto an episode, then
/// alternate [`Backend::step`] calls.
#[derive(Debug, Clone)]
pub struct Backend {
    id: BackendId,
    scene: Arc<Scene>,
    params: SimParams,
    radius: f64,
    seed: u64,
    rng: ChaCha8Rng,
    episode: Option<EpisodeState>,
}

/// Builds a backend with the default reference profile.
pub fn make_backend(id: BackendId, scene: Arc<Scene>, params: &SimParams, seed: u64) -> Backend {
    Backend::new(id, scene, params, &ReferenceProfile::default(), seed)
}

impl Backend {
    pub fn new(id: BackendId, scene: Arc<Scene>, params: &SimParams, profile: &ReferenceProfile, seed: u64) -> Self {
        let params = match id {
            BackendId::TestSim => params.clone(),
            BackendId::ReferenceReal => profile.apply(params),
        };
        Self {
            id,
            scene,
            params,
            radius: AGENT_RADIUS,
            seed,
            rng: rng::stream(seed, &[0]),
            episode: None,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn id(&self) -> BackendId {
        self.id
    }

    pub fn scene(&self) -> &Arc<Scene> {
        &self.scene
    }

    /// Effective parameters after applying the backend profile.
    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Ground-truth pose of the current episode.
    pub fn pose(&self) -> Option<Pose> {
        self.episode.as_ref().map(|e| e.pose)
    }

    pub fn goal(&self) -> Option<Vec2> {
        self.episode.as_ref().map(|e| e.goal)
    }

    pub fn is_stopped(&self) -> bool {
        self.episode.as_ref().is_some_and(|e| e.stopped)
    }

    /// Places the agent for a new episode. The random stream depends only on
    /// `(seed, episode_id)`.
    pub fn reset(&mut self, start: Pose, goal: Vec2, episode_id: u64) -> Result<Observation, BackendError> {
        self.params.validate()?;
        if !self.scene.is_navigable(start.position, self.radius) {
            return Err(GeometryError::NotNavigable {
                x: start.position.x,
                y: start.position.y,
                radius: self.radius,
            }
            .into());
        }
        self.rng = rng::stream(self.seed, &[episode_id]);
        self.episode = Some(EpisodeState {
            pose: start,
            goal,
            stopped: false,
        });
        self.observe()
    }

    /// Executes one action and returns the next observation and whether the
    /// motion was blocked by an obstacle.
    pub fn step(&mut self, action: Action) -> Result<(Observation, bool), BackendError> {
        let mode = self.params.collision_mode();
        let multiplier = self.params.noise_multiplier;
        let ep = self.episode.as_mut().ok_or(BackendError::NotReset)?;
        if ep.stopped {
            return Err(BackendError::StepAfterStop);
        }
        let mut collided = false;
        match sample_displacement(&self.params.actuation, action, multiplier, &mut self.rng) {
            None => ep.stopped = true,
            Some(motion) => {
                let heading = ep.pose.heading();
                let shift = Vec2::new(motion.along, motion.lateral).rotate(heading);
                if shift.norm() > 0.0 {
                    let moved = resolve_move(&self.scene, &ep.pose, shift, self.radius, mode)?;
                    ep.pose.position = moved.position;
                    // a turn is an in-place rotation of a disc; jitter that
                    // meets a wall is not a collision of the action
                    collided = moved.collided && action == Action::Forward;
                }
                ep.pose.set_heading(heading + motion.heading);
            }
        }
        Ok((self.observe()?, collided))
    }

    /// Senses from the current pose. Each call consumes fresh sensor noise.
    pub fn observe(&mut self) -> Result<Observation, BackendError> {
        let ep = self.episode.as_ref().ok_or(BackendError::NotReset)?;
        let pose = ep.pose;
        let goal = ep.goal;
        let p = &self.params;
        let mut depth = Vec::with_capacity(p.rays);
        for i in 0..p.rays {
            let dir = Vec2::from_angle(pose.heading() + ray_offset(i, p.rays, p.fov));
            let range = self.scene.ray_cast(pose.position, dir, p.depth_clip)?;
            let z: f64 = self.rng.sample(StandardNormal);
            let noisy = range * (1.0 + p.depth_noise_sigma * z);
            depth.push(noisy.clamp(MIN_DEPTH, p.depth_clip));
        }
        let zx: f64 = self.rng.sample(StandardNormal);
        let zy: f64 = self.rng.sample(StandardNormal);
        let believed = Pose::new(pose.position + Vec2::new(zx, zy) * p.localization_sigma, pose.heading());
        let (goal_distance, goal_azimuth) = believed.polar_to(goal);
        Ok(Observation {
            depth,
            goal_distance,
            goal_azimuth,
            fov: p.fov,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn room() -> Arc<Scene> {
        Arc::new(Scene::rectangle("room", 6.5, 10.0).unwrap())
    }

    fn start() -> Pose {
        Pose::new(Vec2::new(3.25, 5.0), 0.0)
    }

    #[test]
    fn zero_noise_forward_and_turn_are_exact() {
        let mut b = make_backend(BackendId::TestSim, room(), &SimParams::default(), 7);
        b.reset(start(), Vec2::new(5.0, 5.0), 0).unwrap();
        let (_, collided) = b.step(Action::Forward).unwrap();
        assert!(!collided);
        assert_eq!(b.pose().unwrap().position, Vec2::new(3.5, 5.0));
        b.step(Action::TurnLeft).unwrap();
        assert!((b.pose().unwrap().heading() - PI / 6.0).abs() < 1e-15);
        b.step(Action::TurnRight).unwrap();
        b.step(Action::TurnRight).unwrap();
        assert!((b.pose().unwrap().heading() - (2.0 * PI - PI / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn protocol_errors() {
        let mut b = make_backend(BackendId::TestSim, room(), &SimParams::default(), 7);
        assert_eq!(b.step(Action::Forward), Err(BackendError::NotReset));
        assert!(b.observe().is_err());
        b.reset(start(), Vec2::new(5.0, 5.0), 0).unwrap();
        let (_, collided) = b.step(Action::Stop).unwrap();
        assert!(!collided);
        assert!(b.is_stopped());
        assert_eq!(b.step(Action::Forward), Err(BackendError::StepAfterStop));
        let bad = Pose::new(Vec2::new(0.05, 5.0), 0.0);
        assert!(b.reset(bad, Vec2::new(5.0, 5.0), 1).is_err());
    }

    #[test]
    fn reference_profile_overrides_params() {
        let params = SimParams {
            rays: 9,
            ..SimParams::default()
        };
        let b = make_backend(BackendId::ReferenceReal, room(), &params, 7);
        assert!(!b.params().sliding);
        assert_eq!(b.params().noise_multiplier, 0.3);
        assert_eq!(b.params().localization_sigma, 0.07);
        assert_eq!(b.params().rays, 9);
        let t = make_backend(BackendId::TestSim, room(), &params, 7);
        assert_eq!(t.params(), &params);
    }

    #[test]
    fn observation_geometry() {
        let mut b = make_backend(BackendId::TestSim, room(), &SimParams::default(), 7);
        let obs = b.reset(start(), Vec2::new(5.25, 5.0), 0).unwrap();
        assert!((obs.goal_distance - 2.0).abs() < 1e-12);
        assert_eq!(obs.goal_azimuth, 0.0);
        assert_eq!(obs.depth.len(), 64);
        assert!(obs.depth.iter().all(|d| *d > 0.0 && *d <= 10.0));
        // facing +x from x = 3.25 in a 6.5 m wide room
        assert!((obs.center_depth() - 3.25).abs() < 0.01);
        assert!((obs.ray_angle(0) - FRAC_PI_4 / 2.0).abs() < 1e-12);
        assert!((obs.ray_angle(63) + FRAC_PI_4 / 2.0).abs() < 1e-12);
        let obs = b.reset(start(), start().position, 1).unwrap();
        assert_eq!(obs.goal_distance, 0.0);
    }

    #[test]
    fn turns_never_collide() {
        let params = SimParams::default().with_noise(1.0);
        let mut b = make_backend(BackendId::TestSim, room(), &params, 3);
        b.reset(Pose::new(Vec2::new(AGENT_RADIUS, 5.0), PI), Vec2::new(5.0, 5.0), 0)
            .unwrap();
        for i in 0..200 {
            let a = if i % 2 == 0 {
                Action::TurnLeft
            } else {
                Action::TurnRight
            };
            let (_, collided) = b.step(a).unwrap();
            assert!(!collided);
        }
    }

    #[test]
    fn invalid_params_are_rejected_at_reset() {
        let params = SimParams::default().with_noise(1.5);
        let mut b = make_backend(BackendId::TestSim, room(), &params, 3);
        assert!(matches!(
            b.reset(start(), Vec2::new(5.0, 5.0), 0),
            Err(BackendError::InvalidParams(_))
        ));
    }
}
