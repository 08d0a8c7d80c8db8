//! Map-aware wall follower.
//!
//! Drives straight at the goal while the line of sight is clear. When the
//! straight line is blocked it skirts the obstacle on the side with the
//! shorter path (read off a padded visibility graph) and returns to the
//! straight line as soon as the goal is visible again. Forward steps that
//! would bring the body closer than a small margin to any wall are refused.

use std::collections::VecDeque;

use super::{turn_toward, Agent, AgentId, AgentInput, AIM_TOLERANCE};
use crate::backend::{Action, FORWARD_STEP, TURN_ANGLE};
use crate::geometry::{wrap_angle, GoalField, Pose, Vec2};

/// Extra clearance used when planning.
pub(super) const PLAN_MARGIN: f64 = 0.06;
/// Clearance beyond the body radius that forward steps must keep.
const SAFETY: f64 = 0.02;
const STOP_DISTANCE: f64 = 0.18;

#[derive(Debug, Default)]
pub struct OracleAgent {
    field: Option<GoalField>,
    planned: bool,
    queue: VecDeque<Action>,
}

impl OracleAgent {
    fn field<'a>(&'a mut self, input: &AgentInput<'_>) -> Option<&'a GoalField> {
        if !self.planned {
            self.planned = true;
            let map = input.map;
            self.field = map
                .padded_graph()
                .and_then(|g| g.goal_field(input.goal).ok())
                .filter(|f| f.distance_from(snap(input, input.pose.position)).is_finite())
                .or_else(|| map.graph().and_then(|g| g.goal_field(input.goal).ok()));
        }
        self.field.as_ref()
    }

    fn safe_forward(input: &AgentInput<'_>, heading: f64) -> bool {
        let scene = input.map.scene();
        let r = input.map.radius();
        let p = input.pose.position;
        let q = p + Vec2::from_angle(heading) * FORWARD_STEP;
        let keep = (r + SAFETY).min(scene.clearance(p) - 1e-9);
        scene.contains(q) && scene.segment_clearance(p, q) >= keep
    }
}

/// Moves `p` out of the padded margin so that it sees the padded graph.
fn snap(input: &AgentInput<'_>, p: Vec2) -> Vec2 {
    let scene = input.map.scene();
    let want = input.map.radius() + PLAN_MARGIN;
    let (_, q, d) = scene.nearest_edge_point(p);
    if d >= want || d == 0.0 || !scene.is_free(p) {
        return p;
    }
    let pushed = q + (p - q) / d * (want + 1e-6);
    if scene.is_navigable(pushed, want) {
        pushed
    } else {
        p
    }
}

impl Agent for OracleAgent {
    fn id(&self) -> AgentId {
        AgentId::OracleWallFollower
    }

    fn act(&mut self, input: &AgentInput<'_>) -> Action {
        let pose: Pose = input.pose;
        let p = pose.position;
        if p.distance(input.goal) < STOP_DISTANCE {
            return Action::Stop;
        }
        if let Some(next) = self.queue.pop_front() {
            if next != Action::Forward || Self::safe_forward(input, pose.heading()) {
                return next;
            }
            self.queue.clear();
        }

        let from = snap(input, p);
        let target = self
            .field(input)
            .and_then(|f| f.next_waypoint(from))
            .map_or(input.goal, |(w, _)| w);
        let target = if target.distance(p) < 1e-9 { input.goal } else { target };
        let desired = (target - p).angle();
        let error = wrap_angle(desired - pose.heading());

        if error.abs() <= AIM_TOLERANCE && Self::safe_forward(input, pose.heading()) {
            return Action::Forward;
        }
        // smallest rotation to a heading that is safe and close to the target bearing
        let best = (-6i32..=6)
            .filter(|&k| k != 0)
            .map(|k| (k, pose.heading() + k as f64 * TURN_ANGLE))
            .filter(|&(_, h)| Self::safe_forward(input, h))
            .min_by(|a, b| {
                let cost = |(k, h): (i32, f64)| wrap_angle(desired - h).abs() + 0.01 * k.abs() as f64;
                cost(*a).total_cmp(&cost(*b))
            });
        match best {
            Some((k, h))
                if wrap_angle(desired - h).abs() < error.abs() || !Self::safe_forward(input, pose.heading()) =>
            {
                let turn = if k > 0 { Action::TurnLeft } else { Action::TurnRight };
                self.queue
                    .extend(std::iter::repeat_n(turn, k.unsigned_abs() as usize - 1));
                self.queue.push_back(Action::Forward);
                turn
            }
            Some(_) => Action::Forward,
            None => turn_toward(error),
        }
    }
}
