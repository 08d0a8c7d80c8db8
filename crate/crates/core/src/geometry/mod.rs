//! Planar geometry kernel: scenes, ray casting, disc collision resolution and
//! geodesic distances on a visibility graph.

mod collision;
mod scene;
mod visibility;

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use thiserror::Error;

pub use collision::{resolve_move, CollisionMode, MoveResult};
pub use scene::{Scene, Segment};
pub use visibility::{geodesic_distance, GoalField, NavGraph, CORNER_SEGMENTS};

/// Single contact / navigability tolerance in meters.
pub const CONTACT_EPS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("point ({x:.4}, {y:.4}) lies outside the scene boundary")]
    OutsideBoundary { x: f64, y: f64 },
    #[error("point ({x:.4}, {y:.4}) is not navigable for radius {radius}")]
    NotNavigable { x: f64, y: f64, radius: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` radians from the +x axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Vec2, t: f64) -> Vec2 {
        self + (other - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Normalizes an angle to `[0, 2π)`.
pub fn normalize_heading(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let a = normalize_heading(angle);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

/// Agent position and heading. The heading is kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Self {
            position,
            heading: normalize_heading(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn set_heading(&mut self, heading: f64) {
        self.heading = normalize_heading(heading);
    }

    pub fn forward(&self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }

    /// Polar coordinates `(r, azimuth)` of `target` in this pose's body frame.
    pub fn polar_to(&self, target: Vec2) -> (f64, f64) {
        let delta = target - self.position;
        let r = delta.norm();
        if r == 0.0 {
            return (0.0, 0.0);
        }
        (r, wrap_angle(delta.angle() - self.heading))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heading_normalization() {
        assert_eq!(normalize_heading(0.0), 0.0);
        assert!((normalize_heading(-PI / 2.0) - 1.5 * PI).abs() < 1e-12);
        assert!((normalize_heading(5.0 * PI) - PI).abs() < 1e-12);
        assert!(normalize_heading(-1e-20) < TAU);
        assert!((wrap_angle(1.5 * PI) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
    }

    #[test]
    fn polar_coordinates() {
        let pose = Pose::new(Vec2::new(1.0, 1.0), PI / 2.0);
        let (r, az) = pose.polar_to(Vec2::new(1.0, 3.0));
        assert!((r - 2.0).abs() < 1e-12);
        assert!(az.abs() < 1e-12);
        let (_, az) = pose.polar_to(Vec2::new(0.0, 1.0));
        assert!((az - PI / 2.0).abs() < 1e-12);
        assert_eq!(pose.polar_to(pose.position), (0.0, 0.0));
    }

    #[test]
    fn rotation_and_perp() {
        let v = Vec2::new(1.0, 0.0).rotate(PI / 2.0);
        assert!((v - Vec2::new(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(Vec2::new(1.0, 2.0).perp(), Vec2::new(-2.0, 1.0));
        assert_eq!(Vec2::new(2.0, 0.0).cross(Vec2::new(0.0, 3.0)), 6.0);
    }
}
