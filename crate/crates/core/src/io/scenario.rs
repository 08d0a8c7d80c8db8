//! JSON scenario files: one room layout, its waypoint cycle and suite settings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::backend::AGENT_RADIUS;
use crate::geometry::{Pose, Scene, Vec2};
use crate::task::{Configuration, Limits, ScenarioSuite};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaypointSpec {
    pub x: f64,
    pub y: f64,
    pub heading_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub boundary: Vec<[f64; 2]>,
    #[serde(default)]
    pub obstacles: Vec<Vec<[f64; 2]>>,
    #[serde(default = "default_radius")]
    pub agent_radius: f64,
    pub waypoints: Vec<WaypointSpec>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub limits: Limits,
}

fn default_radius() -> f64 {
    AGENT_RADIUS
}

fn default_trials() -> u32 {
    3
}

fn points(vs: &[[f64; 2]]) -> Vec<Vec2> {
    vs.iter().map(|[x, y]| Vec2::new(*x, *y)).collect()
}

fn coords(vs: &[Vec2]) -> Vec<[f64; 2]> {
    vs.iter().map(|v| [v.x, v.y]).collect()
}

/// Shipped scenario assets by name.
pub const SHIPPED: [(&str, &str); 4] = [
    ("coda_easy", include_str!("../../scenarios/coda_easy.json")),
    ("coda_medium", include_str!("../../scenarios/coda_medium.json")),
    ("coda_hard", include_str!("../../scenarios/coda_hard.json")),
    (
        "exploit_corridor",
        include_str!("../../scenarios/exploit_corridor.json"),
    ),
];

/// The three CODA-like layouts that form the default suite.
pub const DEFAULT_SUITE: [&str; 3] = ["coda_easy", "coda_medium", "coda_hard"];

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let file: Self = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| IoError::Read(path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn shipped(name: &str) -> Result<Self, IoError> {
        let (_, text) = SHIPPED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| IoError::UnknownScenario(name.to_string()))?;
        Self::from_json(text)
    }

    /// Builds a scenario file from a scene; the inverse of [`Self::scene`].
    pub fn from_scene(scene: &Scene, waypoints: &[Pose], agent_radius: f64, trials: u32, limits: Limits) -> Self {
        Self {
            name: scene.name().to_string(),
            boundary: coords(scene.boundary()),
            obstacles: scene.obstacles().iter().map(|o| coords(o)).collect(),
            agent_radius,
            waypoints: waypoints
                .iter()
                .map(|p| WaypointSpec {
                    x: p.position.x,
                    y: p.position.y,
                    heading_deg: p.heading().to_degrees(),
                })
                .collect(),
            trials,
            limits,
        }
    }

    pub fn scene(&self) -> Result<Scene, IoError> {
        Ok(Scene::new(
            self.name.clone(),
            points(&self.boundary),
            self.obstacles.iter().map(|o| points(o)).collect(),
        )?)
    }

    pub fn waypoints(&self) -> Vec<Pose> {
        self.waypoints
            .iter()
            .map(|w| Pose::new(Vec2::new(w.x, w.y), w.heading_deg.to_radians()))
            .collect()
    }

    /// Checks schema-level constraints and every scene invariant.
    pub fn validate(&self) -> Result<(), IoError> {
        let invalid = |m: String| IoError::Invalid(format!("{}: {m}", self.name));
        if self.name.trim().is_empty() {
            return Err(IoError::Invalid("scenario name is empty".into()));
        }
        if !(self.agent_radius > 0.0) || !self.agent_radius.is_finite() {
            return Err(invalid(format!(
                "agent_radius must be positive, got {}",
                self.agent_radius
            )));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be positive".into()));
        }
        self.limits.validate().map_err(|e| invalid(e.to_string()))?;
        if self
            .waypoints
            .iter()
            .any(|w| !(w.x.is_finite() && w.y.is_finite() && w.heading_deg.is_finite()))
        {
            return Err(invalid("waypoints must be finite".into()));
        }
        let scene = self.scene()?;
        for (i, w) in self.waypoints.iter().enumerate() {
            if !scene.is_navigable(Vec2::new(w.x, w.y), self.agent_radius) {
                return Err(invalid(format!("waypoint {i} ({}, {}) is not navigable", w.x, w.y)));
            }
        }
        Ok(())
    }

    /// Scene plus waypoints with precomputed leg geodesics.
    pub fn configuration(&self) -> Result<Configuration, IoError> {
        Ok(Configuration::new(self.scene()?, self.waypoints(), self.agent_radius)?)
    }

    /// A suite over this scenario alone.
    pub fn suite(&self) -> Result<ScenarioSuite, IoError> {
        Self::suite_of(std::slice::from_ref(self))
    }

    /// A suite over several scenarios; they must agree on trials and limits.
    pub fn suite_of(files: &[ScenarioFile]) -> Result<ScenarioSuite, IoError> {
        let first = files.first().ok_or_else(|| IoError::Invalid("no scenarios".into()))?;
        if let Some(other) = files
            .iter()
            .find(|f| f.trials != first.trials || f.limits != first.limits)
        {
            return Err(IoError::Invalid(format!(
                "'{}' and '{}' disagree on trials or limits",
                first.name, other.name
            )));
        }
        let configs = files.iter().map(|f| f.configuration()).collect::<Result<_, _>>()?;
        Ok(ScenarioSuite::new(configs, first.trials, first.limits)?)
    }

    /// The shipped three-layout suite.
    pub fn default_suite() -> Result<ScenarioSuite, IoError> {
        let files = DEFAULT_SUITE
            .iter()
            .map(|n| Self::shipped(n))
            .collect::<Result<Vec<_>, _>>()?;
        Self::suite_of(&files)
    }
}
