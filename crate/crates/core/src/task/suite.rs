//! Waypoint-cycle evaluation suites.

use std::sync::Arc;

use rayon::prelude::*;

use super::{run_episode, EpisodeOutcome, EpisodeSpec, Limits, TaskError};
use crate::agents::{make_agent, AgentId, NavMap};
use crate::backend::{Backend, BackendId, ReferenceProfile, SimParams};
use crate::geometry::{Pose, Scene};
use crate::rng::derive_seed;

/// Waypoints per configuration; legs run A→B, B→C, …, E→A.
pub const LEGS_PER_CONFIGURATION: usize = 5;

/// One room layout with its waypoint cycle.
#[derive(Debug, Clone)]
pub struct Configuration {
    scene: Arc<Scene>,
    map: Arc<NavMap>,
    waypoints: Vec<Pose>,
    legs: Vec<EpisodeSpec>,
}

impl Configuration {
    pub fn new(scene: Scene, waypoints: Vec<Pose>, radius: f64) -> Result<Self, TaskError> {
        if waypoints.len() != LEGS_PER_CONFIGURATION {
            return Err(TaskError::InvalidSuite(format!(
                "'{}' needs {LEGS_PER_CONFIGURATION} waypoints, got {}",
                scene.name(),
                waypoints.len()
            )));
        }
        let scene = Arc::new(scene);
        let map = Arc::new(NavMap::new(Arc::clone(&scene), radius));
        let legs = (0..waypoints.len())
            .map(|k| {
                let goal = waypoints[(k + 1) % waypoints.len()].position;
                EpisodeSpec::new(&map, waypoints[k], goal)
                    .map_err(|e| TaskError::InvalidSuite(format!("'{}' leg {k}: {e}", scene.name())))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            scene,
            map,
            waypoints,
            legs,
        })
    }

    pub fn scene(&self) -> &Arc<Scene> {
        &self.scene
    }

    pub fn map(&self) -> &Arc<NavMap> {
        &self.map
    }

    pub fn waypoints(&self) -> &[Pose] {
        &self.waypoints
    }

    pub fn legs(&self) -> &[EpisodeSpec] {
        &self.legs
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioSuite {
    pub configurations: Vec<Configuration>,
    pub trials: u32,
    pub limits: Limits,
}

/// Stable index of one episode within a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpisodeKey {
    pub config: usize,
    pub leg: usize,
    pub trial: u32,
}

impl ScenarioSuite {
    pub fn new(configurations: Vec<Configuration>, trials: u32, limits: Limits) -> Result<Self, TaskError> {
        if configurations.is_empty() {
            return Err(TaskError::InvalidSuite("no configurations".into()));
        }
        if trials == 0 {
            return Err(TaskError::InvalidSuite("trials must be positive".into()));
        }
        limits.validate()?;
        Ok(Self {
            configurations,
            trials,
            limits,
        })
    }

    pub fn episodes(&self) -> Vec<EpisodeKey> {
        let mut keys = Vec::new();
        for (config, c) in self.configurations.iter().enumerate() {
            for leg in 0..c.legs.len() {
                for trial in 0..self.trials {
                    keys.push(EpisodeKey { config, leg, trial });
                }
            }
        }
        keys
    }

    /// Seed shared by every agent and parameter cell for this episode.
    pub fn episode_seed(&self, seed: u64, key: EpisodeKey) -> u64 {
        derive_seed(seed, &[key.config as u64, key.leg as u64, u64::from(key.trial)])
    }

    /// Runs one agent on one episode of the suite.
    pub fn run_one(
        &self,
        backend: &BackendConfig,
        agent: AgentId,
        key: EpisodeKey,
        seed: u64,
    ) -> Result<EpisodeRecord, TaskError> {
        let config = self
            .configurations
            .get(key.config)
            .ok_or_else(|| TaskError::InvalidArgument(format!("no configuration {}", key.config)))?;
        let spec = config
            .legs
            .get(key.leg)
            .ok_or_else(|| TaskError::InvalidArgument(format!("no leg {}", key.leg)))?;
        let episode_seed = self.episode_seed(seed, key);
        let mut sim = backend.make(Arc::clone(&config.scene), episode_seed, config.map.radius());
        let mut policy = make_agent(agent, episode_seed);
        let outcome = run_episode(&mut sim, policy.as_mut(), &config.map, spec, &self.limits, 0)?;
        Ok(EpisodeRecord {
            agent,
            backend: backend.id,
            scene: config.scene.name().to_string(),
            key,
            seed: episode_seed,
            outcome,
        })
    }
}

/// Backend factory: the id plus everything needed to build a handle.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendConfig {
    pub id: BackendId,
    pub params: SimParams,
    pub profile: ReferenceProfile,
}

impl BackendConfig {
    pub fn new(id: BackendId, params: SimParams) -> Self {
        Self {
            id,
            params,
            profile: ReferenceProfile::default(),
        }
    }

    pub fn reference() -> Self {
        Self::new(BackendId::ReferenceReal, SimParams::default())
    }

    pub fn test_sim(params: SimParams) -> Self {
        Self::new(BackendId::TestSim, params)
    }

    pub fn make(&self, scene: Arc<Scene>, seed: u64, radius: f64) -> Backend {
        Backend::new(self.id, scene, &self.params, &self.profile, seed).with_radius(radius)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub agent: AgentId,
    pub backend: BackendId,
    pub scene: String,
    pub key: EpisodeKey,
    pub seed: u64,
    pub outcome: EpisodeOutcome,
}

/// Per-agent aggregate over a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub agent: AgentId,
    pub success_rate: f64,
    pub success_se: f64,
    pub mean_spl: f64,
    pub spl_se: f64,
    pub records: Vec<EpisodeRecord>,
}

impl EvalResult {
    pub fn from_records(agent: AgentId, records: Vec<EpisodeRecord>) -> Self {
        let success: Vec<f64> = records
            .iter()
            .map(|r| if r.outcome.success { 1.0 } else { 0.0 })
            .collect();
        let spl: Vec<f64> = records.iter().map(|r| r.outcome.spl).collect();
        let (success_rate, success_se) = mean_and_se(&success);
        let (mean_spl, spl_se) = mean_and_se(&spl);
        Self {
            agent,
            success_rate,
            success_se,
            mean_spl,
            spl_se,
            records,
        }
    }
}

/// Mean and standard error (sample standard deviation over `√n`).
pub(crate) fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs every (agent, configuration, leg, trial) episode.
///
/// Episodes run in parallel; results come back in roster order, then by
/// configuration, leg and trial.
pub fn run_suite(
    backend: &BackendConfig,
    roster: &[AgentId],
    suite: &ScenarioSuite,
    seed: u64,
) -> Result<Vec<EvalResult>, TaskError> {
    let keys = suite.episodes();
    let jobs: Vec<(AgentId, EpisodeKey)> = roster.iter().flat_map(|a| keys.iter().map(move |k| (*a, *k))).collect();
    let records: Vec<EpisodeRecord> = jobs
        .par_iter()
        .map(|&(agent, key)| suite.run_one(backend, agent, key, seed))
        .collect::<Result<_, _>>()?;
    let mut records = records.into_iter();
    Ok(roster
        .iter()
        .map(|&agent| EvalResult::from_records(agent, records.by_ref().take(keys.len()).collect()))
        .collect())
}
