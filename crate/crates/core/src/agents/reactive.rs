//! Map-free controllers driven by the goal vector and the depth fan.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{turn_toward, uniform_turn, Agent, AgentId, AgentInput, AIM_TOLERANCE, STOP_DISTANCE};
use crate::backend::{Action, Observation};

const DEG: f64 = PI / 180.0;

/// Stop near the goal, otherwise face it and drive.
pub fn greedy_action(obs: &Observation) -> Action {
    if obs.goal_distance < STOP_DISTANCE {
        Action::Stop
    } else if obs.goal_azimuth.abs() > AIM_TOLERANCE {
        turn_toward(obs.goal_azimuth)
    } else {
        Action::Forward
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyAgent;

impl Agent for GreedyAgent {
    fn id(&self) -> AgentId {
        AgentId::Greedy
    }

    fn act(&mut self, input: &AgentInput<'_>) -> Action {
        greedy_action(input.observation)
    }
}

/// Greedy, but turns away from anything closer than [`Self::CLEARANCE`]
/// ahead and then drives a few steps on the new heading.
#[derive(Debug, Clone, Default)]
pub struct GreedyCautiousAgent {
    avoid_turn: Option<Action>,
    detour_steps: u32,
}

impl GreedyCautiousAgent {
    pub const CLEARANCE: f64 = 0.4;
    const DETOUR: u32 = 2;

    fn open_side(obs: &Observation) -> Action {
        let n = obs.depth.len();
        let left: f64 = obs.depth[..n / 2].iter().sum();
        let right: f64 = obs.depth[n - n / 2..].iter().sum();
        if left >= right {
            Action::TurnLeft
        } else {
            Action::TurnRight
        }
    }
}

impl Agent for GreedyCautiousAgent {
    fn id(&self) -> AgentId {
        AgentId::GreedyCautious
    }

    fn act(&mut self, input: &AgentInput<'_>) -> Action {
        let obs = input.observation;
        if obs.goal_distance < STOP_DISTANCE {
            return Action::Stop;
        }
        let blocked = obs.center_depth() < Self::CLEARANCE || obs.min_depth_within(10.0 * DEG) < Self::CLEARANCE;
        if blocked {
            self.detour_steps = Self::DETOUR;
            return *self.avoid_turn.get_or_insert_with(|| Self::open_side(obs));
        }
        if self.detour_steps > 0 {
            self.detour_steps -= 1;
            return Action::Forward;
        }
        self.avoid_turn = None;
        greedy_action(obs)
    }
}

/// Drives at the goal; when something is close ahead it turns so the goal
/// sits well to its left and takes one step into the obstacle, which a
/// sliding simulator converts into motion along the wall.
#[derive(Debug, Clone, Default)]
pub struct SlideExploiter {
    pressing: bool,
}

impl SlideExploiter {
    const PRESS_DEPTH: f64 = 0.35;
    /// Goal bearing held for a press step.
    const PRESS_BEARING: f64 = 60.0 * DEG;
}

impl Agent for SlideExploiter {
    fn id(&self) -> AgentId {
        AgentId::SlideExploiter
    }

    fn act(&mut self, input: &AgentInput<'_>) -> Action {
        let obs = input.observation;
        if obs.goal_distance < STOP_DISTANCE {
            return Action::Stop;
        }
        if !self.pressing {
            if obs.goal_azimuth.abs() > AIM_TOLERANCE {
                return turn_toward(obs.goal_azimuth);
            }
            if obs.min_depth_within(7.5 * DEG) >= Self::PRESS_DEPTH.min(obs.goal_distance) {
                return Action::Forward;
            }
            self.pressing = true;
        }
        let error = obs.goal_azimuth - Self::PRESS_BEARING;
        if error.abs() > AIM_TOLERANCE {
            // turning right moves the goal further left
            turn_toward(error)
        } else {
            self.pressing = false;
            Action::Forward
        }
    }
}

/// Greedy with a uniformly random turn on a fraction of steps.
#[derive(Debug, Clone)]
pub struct NoisyGreedyAgent {
    rng: ChaCha8Rng,
}

impl NoisyGreedyAgent {
    pub const TURN_PROBABILITY: f64 = 0.2;

    pub fn new(rng: ChaCha8Rng) -> Self {
        Self { rng }
    }
}

impl Agent for NoisyGreedyAgent {
    fn id(&self) -> AgentId {
        AgentId::NoisyGreedy
    }

    fn act(&mut self, input: &AgentInput<'_>) -> Action {
        // one draw per step keeps the stream aligned across backends
        let u: f64 = self.rng.random();
        let turn = uniform_turn(&mut self.rng);
        if u < Self::TURN_PROBABILITY && input.observation.goal_distance >= STOP_DISTANCE {
            turn
        } else {
            greedy_action(input.observation)
        }
    }
}

/// Steers toward the open ray closest to the goal bearing, with depth
/// clipped to [`Self::HORIZON`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ShortSightGreedyAgent;

impl ShortSightGreedyAgent {
    pub const HORIZON: f64 = 2.0;
    const MIN_OPEN: f64 = 0.5;
}

impl Agent for ShortSightGreedyAgent {
    fn id(&self) -> AgentId {
        AgentId::ShortSightGreedy
    }

    fn act(&mut self, input: &AgentInput<'_>) -> Action {
        let obs = input.observation;
        let r = obs.goal_distance;
        if r < STOP_DISTANCE {
            return Action::Stop;
        }
        if obs.goal_azimuth.abs() > obs.fov / 2.0 {
            return turn_toward(obs.goal_azimuth);
        }
        let need = r.clamp(Self::MIN_OPEN, Self::HORIZON);
        let open = |i: usize| obs.depth[i].min(Self::HORIZON) >= need - 1e-9;
        let target = (0..obs.depth.len()).filter(|&i| open(i)).min_by(|&a, &b| {
            (obs.ray_angle(a) - obs.goal_azimuth)
                .abs()
                .total_cmp(&(obs.ray_angle(b) - obs.goal_azimuth).abs())
        });
        match target {
            None => Action::TurnLeft,
            Some(i) => {
                let bearing = obs.ray_angle(i);
                if bearing.abs() > AIM_TOLERANCE {
                    turn_toward(bearing)
                } else if obs.min_depth_within(7.5 * DEG).min(Self::HORIZON) < 0.3 {
                    turn_toward(bearing + 1e-9)
                } else {
                    Action::Forward
                }
            }
        }
    }
}

/// Samples left/right/forward/stop with probabilities 25/25/45/5%.
#[derive(Debug, Clone)]
pub struct RandomWalker {
    rng: ChaCha8Rng,
}

impl RandomWalker {
    pub const DISTRIBUTION: [(Action, f64); 4] = [
        (Action::TurnLeft, 0.25),
        (Action::TurnRight, 0.25),
        (Action::Forward, 0.45),
        (Action::Stop, 0.05),
    ];

    pub fn new(rng: ChaCha8Rng) -> Self {
        Self { rng }
    }
}

impl Agent for RandomWalker {
    fn id(&self) -> AgentId {
        AgentId::RandomWalker
    }

    fn act(&mut self, _input: &AgentInput<'_>) -> Action {
        let mut u: f64 = self.rng.random();
        for (action, p) in Self::DISTRIBUTION {
            if u < p {
                return action;
            }
            u -= p;
        }
        Action::Forward
    }
}
