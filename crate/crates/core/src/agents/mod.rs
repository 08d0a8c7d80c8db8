//! Heuristic navigation controllers.
//!
//! Every agent sees the same [`AgentInput`]. Map-free agents read only the
//! observation; the oracle additionally reads the scene map and true pose.

mod bug;
mod oracle;
mod reactive;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{Action, Observation};
use crate::geometry::{NavGraph, Pose, Scene, Vec2};
use crate::rng;

pub use bug::BugAgent;
pub use oracle::OracleAgent;
pub use reactive::{
    GreedyAgent, GreedyCautiousAgent, NoisyGreedyAgent, RandomWalker, ShortSightGreedyAgent, SlideExploiter,
};

/// Heading error tolerated before a controller turns toward its target.
pub const AIM_TOLERANCE: f64 = 15.0 * std::f64::consts::PI / 180.0;
/// Believed goal distance below which map-free agents stop.
pub const STOP_DISTANCE: f64 = 0.15;

#[derive(Debug, Error)]
#[error("unknown agent id '{0}'")]
pub struct UnknownAgent(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentId {
    Greedy,
    GreedyCautious,
    BugLeft,
    BugRight,
    OracleWallFollower,
    SlideExploiter,
    NoisyGreedy,
    ShortSightGreedy,
    RandomWalker,
}

impl AgentId {
    pub const ALL: [AgentId; 9] = [
        AgentId::Greedy,
        AgentId::GreedyCautious,
        AgentId::BugLeft,
        AgentId::BugRight,
        AgentId::OracleWallFollower,
        AgentId::SlideExploiter,
        AgentId::NoisyGreedy,
        AgentId::ShortSightGreedy,
        AgentId::RandomWalker,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentId::Greedy => "greedy",
            AgentId::GreedyCautious => "greedy_cautious",
            AgentId::BugLeft => "bug_left",
            AgentId::BugRight => "bug_right",
            AgentId::OracleWallFollower => "oracle_wall_follower",
            AgentId::SlideExploiter => "slide_exploiter",
            AgentId::NoisyGreedy => "noisy_greedy",
            AgentId::ShortSightGreedy => "short_sight_greedy",
            AgentId::RandomWalker => "random_walker",
        }
    }

    /// Parses a comma-separated roster; `all` selects every agent.
    pub fn parse_roster(s: &str) -> Result<Vec<AgentId>, UnknownAgent> {
        if s.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|t| t.trim().parse()).collect()
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentId {
    type Err = UnknownAgent;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| UnknownAgent(s.to_string()))
    }
}

/// Top-down map handed to agents: the scene plus lazily built planners.
#[derive(Debug)]
pub struct NavMap {
    scene: Arc<Scene>,
    radius: f64,
    margin: f64,
    padded: OnceLock<Option<Arc<NavGraph>>>,
    exact: OnceLock<Option<Arc<NavGraph>>>,
}

impl NavMap {
    pub fn new(scene: Arc<Scene>, radius: f64) -> Self {
        Self {
            scene,
            radius,
            margin: oracle::PLAN_MARGIN,
            padded: OnceLock::new(),
            exact: OnceLock::new(),
        }
    }

    pub fn scene(&self) -> &Arc<Scene> {
        &self.scene
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Visibility graph for the agent radius.
    pub fn graph(&self) -> Option<&Arc<NavGraph>> {
        self.exact
            .get_or_init(|| NavGraph::build(&self.scene, self.radius).ok().map(Arc::new))
            .as_ref()
    }

    /// Visibility graph for the radius plus a safety margin.
    pub fn padded_graph(&self) -> Option<&Arc<NavGraph>> {
        self.padded
            .get_or_init(|| {
                NavGraph::build(&self.scene, self.radius + self.margin)
                    .ok()
                    .map(Arc::new)
            })
            .as_ref()
    }
}

/// Everything an agent may look at when choosing an action.
#[derive(Debug, Clone, Copy)]
pub struct AgentInput<'a> {
    pub observation: &'a Observation,
    pub map: &'a NavMap,
    /// Ground-truth pose; only the oracle uses it.
    pub pose: Pose,
    pub goal: Vec2,
}

/// A per-episode controller. Construct a fresh instance for every episode.
pub trait Agent: Send {
    fn id(&self) -> AgentId;
    fn act(&mut self, input: &AgentInput<'_>) -> Action;
}

/// Builds the agent for one episode; stochastic agents draw from a stream
/// derived from `episode_seed`.
pub fn make_agent(id: AgentId, episode_seed: u64) -> Box<dyn Agent> {
    let rng = || rng::stream(episode_seed, &[AGENT_STREAM]);
    match id {
        AgentId::Greedy => Box::new(GreedyAgent),
        AgentId::GreedyCautious => Box::new(GreedyCautiousAgent::default()),
        AgentId::BugLeft => Box::new(BugAgent::new(bug::Side::Left)),
        AgentId::BugRight => Box::new(BugAgent::new(bug::Side::Right)),
        AgentId::OracleWallFollower => Box::new(OracleAgent::default()),
        AgentId::SlideExploiter => Box::new(SlideExploiter::default()),
        AgentId::NoisyGreedy => Box::new(NoisyGreedyAgent::new(rng())),
        AgentId::ShortSightGreedy => Box::new(ShortSightGreedyAgent),
        AgentId::RandomWalker => Box::new(RandomWalker::new(rng())),
    }
}

const AGENT_STREAM: u64 = 0xA6E7;

/// Turn that reduces the magnitude of `bearing` (positive is to the left).
pub fn turn_toward(bearing: f64) -> Action {
    if bearing > 0.0 {
        Action::TurnLeft
    } else {
        Action::TurnRight
    }
}

fn uniform_turn(rng: &mut ChaCha8Rng) -> Action {
    if rng.random_bool(0.5) {
        Action::TurnLeft
    } else {
        Action::TurnRight
    }
}
