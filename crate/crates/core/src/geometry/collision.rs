//! Disc-vs-polygon motion resolution with slide and stop-on-contact modes.

use serde::{Deserialize, Serialize};

use super::scene::{Scene, Segment};
use super::{GeometryError, Pose, Vec2, CONTACT_EPS};

/// Collision response applied when a move is blocked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionMode {
    /// Blocked motion is redirected along the contact tangent.
    Slide,
    /// The agent stays where it was on contact.
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveResult {
    pub position: Vec2,
    pub collided: bool,
}

const MAX_CONTACTS: usize = 3;
// Final positions are kept this far outside the contact surface.
const SKIN: f64 = 1e-9;

/// Moves a disc of `radius` from `pose` by `displacement`.
///
/// Slide mode removes the obstacle-normal component of the motion at each
/// contact (at most three constraints). The requested endpoint is pushed out
/// of penetrated constraints the way a navigation mesh snaps targets, so a
/// single step may wrap around a convex corner; the straight chord between
/// the two positions can then cut through the clearance zone of that corner.
pub fn resolve_move(
    scene: &Scene,
    pose: &Pose,
    displacement: Vec2,
    radius: f64,
    mode: CollisionMode,
) -> Result<MoveResult, GeometryError> {
    let start = pose.position;
    if !scene.is_navigable(start, radius) {
        return Err(GeometryError::NotNavigable {
            x: start.x,
            y: start.y,
            radius,
        });
    }
    if !displacement.is_finite() {
        return Err(GeometryError::InvalidArgument("displacement must be finite".into()));
    }
    if displacement.norm() == 0.0 {
        return Ok(MoveResult {
            position: start,
            collided: false,
        });
    }
    if time_of_impact(scene, start, displacement, radius).is_none() {
        let end = start + displacement;
        // the sweep test is exact up to rounding; guard the endpoint anyway
        if scene.is_navigable(end, radius) {
            return Ok(MoveResult {
                position: end,
                collided: false,
            });
        }
    }
    let position = match mode {
        CollisionMode::Stop => start,
        CollisionMode::Slide => slide(scene, start, displacement, radius),
    };
    Ok(MoveResult {
        position,
        collided: true,
    })
}

fn slide(scene: &Scene, start: Vec2, d: Vec2, radius: f64) -> Vec2 {
    let limit = d.norm() + CONTACT_EPS;
    if let Some(end) = project_target(scene, start + d, radius) {
        let chord = Segment::new(start, end);
        let through_solid = scene.edges().iter().any(|e| chord.crosses_properly(e));
        if start.distance(end) <= limit && !through_solid {
            return end;
        }
    }
    let end = swept_slide(scene, start, d, radius);
    if scene.is_navigable(end, radius) && start.distance(end) <= limit {
        end
    } else {
        start
    }
}

/// Pushes `target` out of penetrated constraints along their normals.
fn project_target(scene: &Scene, mut target: Vec2, radius: f64) -> Option<Vec2> {
    for _ in 0..MAX_CONTACTS {
        let (edge, q, dist) = scene.nearest_edge_point(target);
        let solid = !scene.is_free(target);
        if !solid && dist >= radius {
            return Some(target);
        }
        let outward = if dist > 0.0 {
            let n = (target - q) / dist;
            if solid {
                -n
            } else {
                n
            }
        } else {
            scene.edges()[edge].free_normal()
        };
        target = q + outward * (radius + SKIN);
    }
    scene.is_navigable(target, radius).then_some(target)
}

/// Continuous sliding: advance to first contact, drop the normal component,
/// repeat for at most three contacts, then stop the remaining motion.
fn swept_slide(scene: &Scene, start: Vec2, d: Vec2, radius: f64) -> Vec2 {
    let mut pos = start;
    let mut remaining = d;
    for _ in 0..MAX_CONTACTS {
        if remaining.norm() < 1e-12 {
            break;
        }
        match time_of_impact(scene, pos, remaining, radius) {
            None => {
                let next = pos + remaining;
                if scene.is_navigable(next, radius) {
                    pos = next;
                }
                return pos;
            }
            Some((t, normal)) => {
                let next = pos + remaining * t + normal * SKIN;
                if scene.is_navigable(next, radius) {
                    pos = next;
                }
                remaining = remaining * (1.0 - t);
                let into = remaining.dot(normal);
                if into < 0.0 {
                    remaining = remaining - normal * into;
                }
            }
        }
    }
    pos
}

/// Earliest `t` in `[0, 1]` at which the disc moving by `d` touches an edge,
/// with the contact normal (pointing from the contact toward the disc).
pub(crate) fn time_of_impact(scene: &Scene, p: Vec2, d: Vec2, radius: f64) -> Option<(f64, Vec2)> {
    let mut best: Option<(f64, Vec2)> = None;
    let mut consider = |t: f64, n: Vec2| {
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, n));
        }
    };
    for seg in scene.edges() {
        let q = seg.closest_point(p);
        let d0 = p.distance(q);
        if d0 <= radius + 1e-9 {
            let n = if d0 > 0.0 { (p - q) / d0 } else { seg.free_normal() };
            if d.dot(n) < -1e-12 {
                consider(0.0, n);
            }
            continue;
        }
        // flat part of the capsule
        let e = seg.b - seg.a;
        let len = e.norm();
        if len > 0.0 {
            let mut m = e.perp() / len;
            let mut sd = (p - seg.a).dot(m);
            if sd < 0.0 {
                m = -m;
                sd = -sd;
            }
            let vn = d.dot(m);
            if vn < 0.0 {
                let t = (sd - radius) / -vn;
                if (0.0..=1.0).contains(&t) {
                    let u = (p + d * t - seg.a).dot(e) / (len * len);
                    if (0.0..=1.0).contains(&u) {
                        consider(t, m);
                    }
                }
            }
        }
        // rounded ends
        for c in [seg.a, seg.b] {
            let f = p - c;
            let a = d.norm_sq();
            let b = 2.0 * f.dot(d);
            let cc = f.norm_sq() - radius * radius;
            let disc = b * b - 4.0 * a * cc;
            if cc > 0.0 && disc >= 0.0 {
                let t = (-b - disc.sqrt()) / (2.0 * a);
                if (0.0..=1.0).contains(&t) {
                    if let Some(n) = (p + d * t - c).normalized() {
                        consider(t, n);
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    const R: f64 = 0.175;

    fn room() -> Scene {
        Scene::rectangle("room", 6.5, 10.0).unwrap()
    }

    #[test]
    fn free_space_move_is_exact() {
        let s = room();
        let pose = Pose::new(Vec2::new(3.0, 5.0), 0.0);
        let r = resolve_move(&s, &pose, Vec2::new(0.25, 0.0), R, CollisionMode::Slide).unwrap();
        assert_eq!(r.position, Vec2::new(3.25, 5.0));
        assert!(!r.collided);
    }

    #[test]
    fn slide_along_wall_keeps_tangential_part() {
        let s = room();
        // touching the x = 0 wall
        let pose = Pose::new(Vec2::new(R, 5.0), 0.0);
        let d = Vec2::from_angle(3.0 * FRAC_PI_4) * 0.25;
        let r = resolve_move(&s, &pose, d, R, CollisionMode::Slide).unwrap();
        assert!(r.collided);
        let moved = r.position - pose.position;
        assert!((moved.norm() - 0.25 * FRAC_PI_4.cos()).abs() < 1e-6);
        assert!(moved.x.abs() < 1e-6);
        assert!(moved.y > 0.0);
    }

    #[test]
    fn stop_mode_stays_put() {
        let s = room();
        let pose = Pose::new(Vec2::new(R, 5.0), 0.0);
        let d = Vec2::from_angle(3.0 * FRAC_PI_4) * 0.25;
        let r = resolve_move(&s, &pose, d, R, CollisionMode::Stop).unwrap();
        assert!(r.collided);
        assert_eq!(r.position, pose.position);
    }

    #[test]
    fn head_on_stop_in_both_modes() {
        let s = room();
        let pose = Pose::new(Vec2::new(0.3, 5.0), 0.0);
        let d = Vec2::new(-0.25, 0.0);
        let r = resolve_move(&s, &pose, d, R, CollisionMode::Slide).unwrap();
        assert!(r.collided);
        assert!((r.position.x - R).abs() < 1e-6);
        assert!((r.position.y - 5.0).abs() < 1e-9);
    }

    #[test]
    fn corner_pocket_is_bounded() {
        let s = room();
        let pose = Pose::new(Vec2::new(0.2, 0.2), 0.0);
        let d = Vec2::new(-0.2, -0.1);
        let r = resolve_move(&s, &pose, d, R, CollisionMode::Slide).unwrap();
        assert!(s.clearance(r.position) >= R - CONTACT_EPS);
        assert!(r.position.distance(pose.position) <= d.norm() + CONTACT_EPS);
    }

    #[test]
    fn no_tunnelling_through_thin_wall() {
        let s = room()
            .with_obstacle(vec![
                Vec2::new(1.0, 4.98),
                Vec2::new(5.0, 4.98),
                Vec2::new(5.0, 5.02),
                Vec2::new(1.0, 5.02),
            ])
            .unwrap();
        let pose = Pose::new(Vec2::new(3.0, 5.02 + R + 0.01), 0.0);
        let r = resolve_move(&s, &pose, Vec2::new(0.0, -0.25), R, CollisionMode::Slide).unwrap();
        assert!(r.collided);
        assert!(r.position.y > 5.0);
    }

    #[test]
    fn non_navigable_start_is_rejected() {
        let s = room();
        let pose = Pose::new(Vec2::new(0.1, 5.0), 0.0);
        assert!(resolve_move(&s, &pose, Vec2::new(0.1, 0.0), R, CollisionMode::Slide).is_err());
    }
}
