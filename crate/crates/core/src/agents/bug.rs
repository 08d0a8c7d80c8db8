//! Bug-2 style wall following with dead-reckoned heading.

use std::f64::consts::PI;

use super::{turn_toward, Agent, AgentId, AgentInput, AIM_TOLERANCE, STOP_DISTANCE};
use crate::backend::{Action, TURN_ANGLE};
use crate::geometry::Vec2;

const BLOCK_DEPTH: f64 = 0.45;
const BLOCK_HALF_WIDTH: f64 = 12.0 * PI / 180.0;
const MLINE_TOLERANCE: f64 = 0.2;
const LEAVE_PROGRESS: f64 = 0.2;
const STEPS_BETWEEN_PEEKS: u32 = 2;

/// Side on which the wall is kept while following.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn toward_wall(self) -> Action {
        match self {
            Side::Left => Action::TurnLeft,
            Side::Right => Action::TurnRight,
        }
    }

    fn away_from_wall(self) -> Action {
        match self {
            Side::Left => Action::TurnRight,
            Side::Right => Action::TurnLeft,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    ToGoal,
    Follow { hit_distance: f64, since_peek: u32 },
}

#[derive(Debug, Clone)]
pub struct BugAgent {
    side: Side,
    mode: Mode,
    // heading integrated from commanded turns, relative to the start
    heading: f64,
    last: Option<Action>,
    // unit vector from the goal toward the start, in the dead-reckoned frame
    mline: Option<Vec2>,
}

impl BugAgent {
    pub fn new(side: Side) -> Self {
        Self {
            side,
            mode: Mode::ToGoal,
            heading: 0.0,
            last: None,
            mline: None,
        }
    }

    fn head_to_goal(&mut self, azimuth: f64, blocked: bool, r: f64) -> Action {
        if azimuth.abs() > AIM_TOLERANCE {
            return turn_toward(azimuth);
        }
        if blocked {
            self.mode = Mode::Follow {
                hit_distance: r,
                since_peek: 0,
            };
            return self.side.away_from_wall();
        }
        Action::Forward
    }
}

impl Agent for BugAgent {
    fn id(&self) -> AgentId {
        match self.side {
            Side::Left => AgentId::BugLeft,
            Side::Right => AgentId::BugRight,
        }
    }

    fn act(&mut self, input: &AgentInput<'_>) -> Action {
        let action = self.decide(input);
        self.last = Some(action);
        action
    }
}

impl BugAgent {
    fn decide(&mut self, input: &AgentInput<'_>) -> Action {
        match self.last {
            Some(Action::TurnLeft) => self.heading += TURN_ANGLE,
            Some(Action::TurnRight) => self.heading -= TURN_ANGLE,
            _ => {}
        }
        let obs = input.observation;
        let r = obs.goal_distance;
        if r < STOP_DISTANCE {
            return Action::Stop;
        }
        // position relative to the goal
        let pos = Vec2::from_angle(self.heading + obs.goal_azimuth) * -r;
        let mline = *self
            .mline
            .get_or_insert_with(|| pos.normalized().unwrap_or(Vec2::new(1.0, 0.0)));
        let blocked = obs.min_depth_within(BLOCK_HALF_WIDTH) < BLOCK_DEPTH;

        match self.mode {
            Mode::ToGoal => self.head_to_goal(obs.goal_azimuth, blocked, r),
            Mode::Follow {
                hit_distance,
                since_peek,
            } => {
                let on_mline = pos.cross(mline).abs() < MLINE_TOLERANCE && pos.dot(mline) > 0.0;
                if on_mline && r < hit_distance - LEAVE_PROGRESS {
                    self.mode = Mode::ToGoal;
                    return self.head_to_goal(obs.goal_azimuth, blocked, r);
                }
                let mut since_peek = since_peek;
                let action = if blocked {
                    since_peek = 0;
                    self.side.away_from_wall()
                } else if self.last == Some(self.side.toward_wall()) || since_peek < STEPS_BETWEEN_PEEKS {
                    since_peek += 1;
                    Action::Forward
                } else {
                    since_peek = 0;
                    self.side.toward_wall()
                };
                self.mode = Mode::Follow {
                    hit_distance,
                    since_peek,
                };
                action
            }
        }
    }
}
