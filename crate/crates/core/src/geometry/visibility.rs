//! Shortest navigable paths for a disc agent.
//!
//! Every scene edge and obstacle is inflated by the agent radius into a convex
//! polygon whose rounded corners are approximated by inscribed arcs of
//! [`CORNER_SEGMENTS`] segments. Inscribed arcs make the inflated shapes a
//! subset of the true configuration-space obstacles, so graph distances never
//! exceed the length of any navigable path.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;
use std::sync::Arc;

use super::scene::{point_in_convex, Scene};
use super::{GeometryError, Vec2, CONTACT_EPS};

/// Arc segments used per inflated corner.
pub const CORNER_SEGMENTS: usize = 8;

// Points this deep inside an inflated shape are blocked. Navigable points may
// sit up to CONTACT_EPS inside.
const INTERIOR_MARGIN: f64 = 2.0 * CONTACT_EPS;

#[derive(Debug, Clone)]
struct Shape {
    vertices: Vec<Vec2>,
    min: Vec2,
    max: Vec2,
}

impl Shape {
    fn new(vertices: Vec<Vec2>) -> Self {
        let (min, max) = vertices.iter().fold(
            (
                Vec2::new(f64::INFINITY, f64::INFINITY),
                Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), v| {
                (
                    Vec2::new(lo.x.min(v.x), lo.y.min(v.y)),
                    Vec2::new(hi.x.max(v.x), hi.y.max(v.y)),
                )
            },
        );
        Self { vertices, min, max }
    }

    fn contains(&self, p: Vec2) -> bool {
        p.x > self.min.x
            && p.x < self.max.x
            && p.y > self.min.y
            && p.y < self.max.y
            && point_in_convex(&self.vertices, p, INTERIOR_MARGIN)
    }

    /// Whether the open segment `a`-`b` passes through the shape interior
    /// (Cyrus-Beck clipping against the convex polygon).
    fn blocks(&self, a: Vec2, b: Vec2) -> bool {
        if a.x.max(b.x) <= self.min.x
            || a.x.min(b.x) >= self.max.x
            || a.y.max(b.y) <= self.min.y
            || a.y.min(b.y) >= self.max.y
        {
            return false;
        }
        let d = b - a;
        let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
        let n = self.vertices.len();
        for i in 0..n {
            let v = self.vertices[i];
            let e = self.vertices[(i + 1) % n] - v;
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            // signed inside-distance of a + t d is num + t den
            let num = e.cross(a - v) / len - INTERIOR_MARGIN;
            let den = e.cross(d) / len;
            if den == 0.0 {
                if num <= 0.0 {
                    return false;
                }
            } else {
                let t = -num / den;
                if den > 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
                if t0 >= t1 {
                    return false;
                }
            }
        }
        t1 - t0 > 1e-12
    }
}

/// Inflates a convex CCW polygon (or a segment given as two points) by
/// `radius` with inscribed circular arcs at the corners.
#[allow(clippy::needless_range_loop)]
fn inflate(poly: &[Vec2], radius: f64) -> Vec<Vec2> {
    let n = poly.len();
    let normal = |i: usize| {
        let e = poly[(i + 1) % n] - poly[i];
        Vec2::new(e.y, -e.x).normalized().unwrap_or(Vec2::ZERO)
    };
    let mut out: Vec<Vec2> = Vec::with_capacity(n * (CORNER_SEGMENTS + 1));
    for i in 0..n {
        let from = normal((i + n - 1) % n).angle();
        let mut sweep = normal(i).angle() - from;
        while sweep < 0.0 {
            sweep += TAU;
        }
        while sweep >= TAU {
            sweep -= TAU;
        }
        for k in 0..=CORNER_SEGMENTS {
            let a = from + sweep * k as f64 / CORNER_SEGMENTS as f64;
            let p = poly[i] + Vec2::from_angle(a) * radius;
            if out.last().is_none_or(|q| q.distance(p) > 1e-12) {
                out.push(p);
            }
        }
    }
    if out.len() > 1 && out[0].distance(out[out.len() - 1]) <= 1e-12 {
        out.pop();
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Visibility graph over inflated obstacle corners for one scene and radius.
#[derive(Debug, Clone)]
pub struct NavGraph {
    scene: Scene,
    radius: f64,
    shapes: Vec<Shape>,
    nodes: Vec<Vec2>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl NavGraph {
    pub fn build(scene: &Scene, radius: f64) -> Result<Self, GeometryError> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(GeometryError::InvalidArgument(format!(
                "radius must be a finite non-negative number, got {radius}"
            )));
        }
        let mut shapes: Vec<Shape> = Vec::new();
        let mut raw_nodes: Vec<(usize, Vec2)> = Vec::new();
        let mut push = |verts: Vec<Vec2>, shapes: &mut Vec<Shape>| {
            let id = shapes.len();
            raw_nodes.extend(verts.iter().map(|v| (id, *v)));
            shapes.push(Shape::new(verts));
        };
        for e in scene.edges().iter().take(scene.boundary().len()) {
            if radius > 0.0 {
                push(inflate(&[e.a, e.b], radius), &mut shapes);
            }
        }
        for o in scene.obstacles() {
            if radius > 0.0 {
                push(inflate(o, radius), &mut shapes);
            } else {
                push(o.clone(), &mut shapes);
            }
        }
        if radius == 0.0 {
            // reflex boundary corners are the only extra turning points
            raw_nodes.extend(scene.boundary().iter().map(|v| (usize::MAX, *v)));
        }

        let nodes: Vec<Vec2> = raw_nodes
            .iter()
            .filter(|(owner, p)| {
                scene.contains(*p)
                    && scene.obstacles().iter().all(|o| !point_in_convex(o, *p, 0.0))
                    && shapes.iter().enumerate().all(|(i, s)| i == *owner || !s.contains(*p))
            })
            .map(|(_, p)| *p)
            .collect();

        let mut graph = Self {
            scene: scene.clone(),
            radius,
            shapes,
            nodes,
            adjacency: Vec::new(),
        };
        let n = graph.nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (graph.nodes[i], graph.nodes[j]);
                if graph.visible(a, b) {
                    let w = a.distance(b);
                    adjacency[i].push((j, w));
                    adjacency[j].push((i, w));
                }
            }
        }
        graph.adjacency = adjacency;
        Ok(graph)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Whether the straight segment stays clear of every inflated shape.
    pub fn visible(&self, a: Vec2, b: Vec2) -> bool {
        if self.radius == 0.0 {
            let s = super::Segment::new(a, b);
            let mid = a.lerp(b, 0.5);
            return self.scene.edges().iter().all(|e| !s.crosses_properly(e))
                && self.scene.is_free(mid)
                && !self.shapes.iter().any(|sh| sh.blocks(a, b));
        }
        !self.shapes.iter().any(|s| s.blocks(a, b))
    }

    fn check_endpoint(&self, p: Vec2) -> Result<(), GeometryError> {
        if self.scene.is_navigable(p, self.radius) {
            Ok(())
        } else {
            Err(GeometryError::NotNavigable {
                x: p.x,
                y: p.y,
                radius: self.radius,
            })
        }
    }

    /// Shortest-path distances from `source` to every graph node.
    fn dijkstra_from(&self, source: Vec2) -> Vec<f64> {
        let n = self.nodes.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if self.visible(source, *node) {
                dist[i] = source.distance(*node);
                heap.push(Entry { cost: dist[i], node: i });
            }
        }
        while let Some(Entry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &(next, w) in &self.adjacency[node] {
                let c = cost + w;
                if c < dist[next] {
                    dist[next] = c;
                    heap.push(Entry { cost: c, node: next });
                }
            }
        }
        dist
    }

    /// Geodesic distance between two navigable points; `+inf` if disconnected.
    pub fn distance(&self, a: Vec2, b: Vec2) -> Result<f64, GeometryError> {
        self.check_endpoint(a)?;
        self.check_endpoint(b)?;
        if a == b {
            return Ok(0.0);
        }
        if self.visible(a, b) {
            return Ok(a.distance(b));
        }
        let dist = self.dijkstra_from(b);
        Ok(self
            .nodes
            .iter()
            .zip(&dist)
            .filter(|(n, d)| d.is_finite() && self.visible(a, **n))
            .map(|(n, d)| d + a.distance(*n))
            .fold(f64::INFINITY, f64::min))
    }

    /// Precomputes distances to `goal` for repeated queries.
    pub fn goal_field(self: &Arc<Self>, goal: Vec2) -> Result<GoalField, GeometryError> {
        self.check_endpoint(goal)?;
        Ok(GoalField::new(Arc::clone(self), goal))
    }
}

/// Distances from every graph node to a fixed goal.
#[derive(Debug, Clone)]
pub struct GoalField {
    graph: Arc<NavGraph>,
    goal: Vec2,
    dist: Vec<f64>,
    // node indices sorted by distance-to-goal
    order: Vec<usize>,
}

impl GoalField {
    fn new(graph: Arc<NavGraph>, goal: Vec2) -> Self {
        let dist = graph.dijkstra_from(goal);
        let mut order: Vec<usize> = (0..dist.len()).filter(|&i| dist[i].is_finite()).collect();
        order.sort_by(|&i, &j| dist[i].total_cmp(&dist[j]).then(i.cmp(&j)));
        Self {
            graph,
            goal,
            dist,
            order,
        }
    }

    pub fn goal(&self) -> Vec2 {
        self.goal
    }

    /// Geodesic distance from `p` to the goal (`+inf` if disconnected).
    pub fn distance_from(&self, p: Vec2) -> f64 {
        self.next_waypoint(p).map_or(f64::INFINITY, |(_, d)| d)
    }

    /// First point to head for on a shortest path from `p`, with the total
    /// remaining distance.
    pub fn next_waypoint(&self, p: Vec2) -> Option<(Vec2, f64)> {
        if p == self.goal || self.graph.visible(p, self.goal) {
            return Some((self.goal, p.distance(self.goal)));
        }
        let mut best: Option<(Vec2, f64)> = None;
        for &i in &self.order {
            let node = self.graph.nodes[i];
            let lower = self.dist[i];
            if best.is_some_and(|(_, b)| lower >= b) {
                break;
            }
            let total = lower + p.distance(node);
            if best.is_some_and(|(_, b)| total >= b) {
                continue;
            }
            if self.graph.visible(p, node) {
                best = Some((node, total));
            }
        }
        best
    }
}

/// Geodesic distance for a disc of `radius` between navigable points.
pub fn geodesic_distance(scene: &Scene, a: Vec2, b: Vec2, radius: f64) -> Result<f64, GeometryError> {
    NavGraph::build(scene, radius)?.distance(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: f64 = 0.175;

    fn room_with_box() -> Scene {
        Scene::rectangle("room", 6.5, 10.0)
            .unwrap()
            .with_obstacle(vec![
                Vec2::new(2.5, 4.5),
                Vec2::new(4.0, 4.5),
                Vec2::new(4.0, 5.5),
                Vec2::new(2.5, 5.5),
            ])
            .unwrap()
    }

    #[test]
    fn inflated_box_has_arcs() {
        let sq = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let inf = inflate(&sq, 0.5);
        assert_eq!(inf.len(), 4 * (CORNER_SEGMENTS + 1));
        for v in &inf {
            let q = Vec2::new(v.x.clamp(0.0, 1.0), v.y.clamp(0.0, 1.0));
            assert!((v.distance(q) - 0.5).abs() < 1e-12);
        }
        let cap = inflate(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)], 0.5);
        assert_eq!(cap.len(), 2 * (CORNER_SEGMENTS + 1));
    }

    #[test]
    fn free_space_geodesic_is_euclidean() {
        let s = Scene::rectangle("room", 6.5, 10.0).unwrap();
        let a = Vec2::new(1.0, 1.0);
        let b = Vec2::new(5.0, 8.0);
        let d = geodesic_distance(&s, a, b, R).unwrap();
        assert!((d - a.distance(b)).abs() < 1e-12);
        assert_eq!(geodesic_distance(&s, a, a, R).unwrap(), 0.0);
    }

    #[test]
    fn detour_around_box() {
        let s = room_with_box();
        let a = Vec2::new(3.25, 3.0);
        let b = Vec2::new(3.25, 7.0);
        let d = geodesic_distance(&s, a, b, R).unwrap();
        assert!(d > 4.0);
        // crude upper bound: around the left side with full clearance
        let via = [Vec2::new(2.5 - R, 4.5 - R), Vec2::new(2.5 - R, 5.5 + R)];
        let upper = a.distance(via[0]) + via[0].distance(via[1]) + via[1].distance(b);
        assert!(d <= upper + 1e-9, "{d} > {upper}");
        let back = geodesic_distance(&s, b, a, R).unwrap();
        assert!((d - back).abs() <= 1e-9 * d);
    }

    #[test]
    fn blocked_room_is_disconnected() {
        let s = Scene::rectangle("room", 6.5, 10.0)
            .unwrap()
            .with_obstacle(vec![
                Vec2::new(0.2, 4.5),
                Vec2::new(6.3, 4.5),
                Vec2::new(6.3, 5.5),
                Vec2::new(0.2, 5.5),
            ])
            .unwrap();
        let d = geodesic_distance(&s, Vec2::new(3.0, 2.0), Vec2::new(3.0, 8.0), R).unwrap();
        assert!(d.is_infinite());
    }

    #[test]
    fn endpoint_must_be_navigable() {
        let s = room_with_box();
        let err = geodesic_distance(&s, Vec2::new(0.05, 1.0), Vec2::new(3.0, 1.0), R);
        assert!(matches!(err, Err(GeometryError::NotNavigable { .. })));
    }

    #[test]
    fn goal_field_matches_pairwise_queries() {
        let s = room_with_box();
        let g = Arc::new(NavGraph::build(&s, R).unwrap());
        let goal = Vec2::new(3.25, 7.0);
        let field = g.goal_field(goal).unwrap();
        for p in [Vec2::new(3.25, 3.0), Vec2::new(1.0, 5.0), Vec2::new(5.5, 2.0)] {
            let a = field.distance_from(p);
            let b = g.distance(p, goal).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }
}
