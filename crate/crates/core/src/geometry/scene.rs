use super::{GeometryError, Vec2, CONTACT_EPS};

/// A directed line segment. Scene edges keep free space on their left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }

    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let e = self.b - self.a;
        let len_sq = e.norm_sq();
        if len_sq == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(e) / len_sq).clamp(0.0, 1.0);
        self.a + e * t
    }

    pub fn distance_to(&self, p: Vec2) -> f64 {
        p.distance(self.closest_point(p))
    }

    /// Unit normal pointing into free space (left of the edge direction).
    pub fn free_normal(&self) -> Vec2 {
        (self.b - self.a).perp().normalized().unwrap_or(Vec2::ZERO)
    }

    /// Ray parameter of the first intersection with this segment, if any.
    pub fn ray_hit(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let e = self.b - self.a;
        let denom = dir.cross(e);
        let w = self.a - origin;
        if denom.abs() < 1e-15 {
            // parallel; only a collinear overlap can be hit
            if w.cross(dir).abs() > 1e-12 {
                return None;
            }
            let ta = w.dot(dir);
            let tb = (self.b - origin).dot(dir);
            let (lo, hi) = if ta < tb { (ta, tb) } else { (tb, ta) };
            return if hi < 0.0 { None } else { Some(lo.max(0.0)) };
        }
        let t = w.cross(e) / denom;
        let u = w.cross(dir) / denom;
        (t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u)).then_some(t)
    }

    /// Whether two segments share any point (touching counts).
    pub fn intersects(&self, other: &Segment) -> bool {
        let d1 = orient(other.a, other.b, self.a);
        let d2 = orient(other.a, other.b, self.b);
        let d3 = orient(self.a, self.b, other.a);
        let d4 = orient(self.a, self.b, other.b);
        if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
            return true;
        }
        (d1 == 0.0 && on_segment(other.a, other.b, self.a))
            || (d2 == 0.0 && on_segment(other.a, other.b, self.b))
            || (d3 == 0.0 && on_segment(self.a, self.b, other.a))
            || (d4 == 0.0 && on_segment(self.a, self.b, other.b))
    }

    /// Whether the segments cross at a single interior point of both.
    pub fn crosses_properly(&self, other: &Segment) -> bool {
        let d1 = orient(other.a, other.b, self.a);
        let d2 = orient(other.a, other.b, self.b);
        let d3 = orient(self.a, self.b, other.a);
        let d4 = orient(self.a, self.b, other.b);
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    }

    /// Minimum distance between two segments.
    pub fn distance_to_segment(&self, other: &Segment) -> f64 {
        if self.intersects(other) {
            return 0.0;
        }
        self.distance_to(other.a)
            .min(self.distance_to(other.b))
            .min(other.distance_to(self.a))
            .min(other.distance_to(self.b))
    }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

pub(crate) fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Even-odd point-in-polygon test; points on the border may go either way.
pub(crate) fn point_in_polygon(poly: &[Vec2], p: Vec2) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Strict containment in a counter-clockwise convex polygon.
pub(crate) fn point_in_convex(poly: &[Vec2], p: Vec2, margin: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = b - a;
        let len = e.norm();
        len == 0.0 || e.cross(p - a) / len > margin
    })
}

fn edges_of(poly: &[Vec2]) -> impl Iterator<Item = Segment> + '_ {
    let n = poly.len();
    (0..n).map(move |i| Segment::new(poly[i], poly[(i + 1) % n]))
}

/// Polygonal world: a simple boundary polygon with convex obstacles inside.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    name: String,
    boundary: Vec<Vec2>,
    obstacles: Vec<Vec<Vec2>>,
    /// Boundary edges (CCW) followed by obstacle edges (CW), so free space
    /// is always on the left.
    edges: Vec<Segment>,
}

impl Scene {
    /// Builds and validates a scene. Polygons given clockwise are reoriented.
    pub fn new(name: impl Into<String>, boundary: Vec<Vec2>, obstacles: Vec<Vec<Vec2>>) -> Result<Self, GeometryError> {
        let name = name.into();
        let invalid = |msg: String| GeometryError::InvalidScene(format!("{name}: {msg}"));

        let boundary = dedup_closing(boundary);
        if boundary.len() < 3 {
            return Err(invalid("boundary needs at least 3 vertices".into()));
        }
        if !boundary.iter().all(|v| v.is_finite()) {
            return Err(invalid("boundary has non-finite coordinates".into()));
        }
        let mut boundary = boundary;
        let area = signed_area(&boundary);
        if area.abs() < 1e-12 {
            return Err(invalid("boundary is degenerate".into()));
        }
        if area < 0.0 {
            boundary.reverse();
        }
        let bedges: Vec<Segment> = edges_of(&boundary).collect();
        let n = bedges.len();
        for i in 0..n {
            if bedges[i].a.distance(bedges[i].b) == 0.0 {
                return Err(invalid(format!("boundary edge {i} has zero length")));
            }
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if !adjacent && bedges[i].intersects(&bedges[j]) {
                    return Err(invalid(format!("boundary is not simple (edges {i} and {j} intersect)")));
                }
            }
        }

        let mut obs: Vec<Vec<Vec2>> = Vec::with_capacity(obstacles.len());
        for (k, poly) in obstacles.into_iter().enumerate() {
            let mut poly = dedup_closing(poly);
            if poly.len() < 3 || !poly.iter().all(|v| v.is_finite()) {
                return Err(invalid(format!("obstacle {k} needs 3 finite vertices")));
            }
            let area = signed_area(&poly);
            if area.abs() < 1e-12 {
                return Err(invalid(format!("obstacle {k} is degenerate")));
            }
            if area < 0.0 {
                poly.reverse();
            }
            if !is_convex_ccw(&poly) {
                return Err(invalid(format!("obstacle {k} is not convex")));
            }
            for v in &poly {
                if !point_in_polygon(&boundary, *v) {
                    return Err(invalid(format!("obstacle {k} is not inside the boundary")));
                }
            }
            for e in edges_of(&poly) {
                if bedges.iter().any(|b| b.intersects(&e)) {
                    return Err(invalid(format!("obstacle {k} touches the boundary")));
                }
            }
            for (j, other) in obs.iter().enumerate() {
                if convex_overlap(&poly, other.as_slice()) {
                    return Err(invalid(format!("obstacles {j} and {k} overlap")));
                }
            }
            obs.push(poly);
        }

        let mut edges = bedges;
        for poly in &obs {
            // reversed so the obstacle interior lies on the right
            let n = poly.len();
            edges.extend((0..n).map(|i| Segment::new(poly[(i + 1) % n], poly[i])));
        }

        Ok(Self {
            name,
            boundary,
            obstacles: obs,
            edges,
        })
    }

    /// Axis-aligned rectangular room with no obstacles.
    pub fn rectangle(name: impl Into<String>, width: f64, height: f64) -> Result<Self, GeometryError> {
        Self::new(
            name,
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(width, 0.0),
                Vec2::new(width, height),
                Vec2::new(0.0, height),
            ],
            Vec::new(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn boundary(&self) -> &[Vec2] {
        &self.boundary
    }

    pub fn obstacles(&self) -> &[Vec<Vec2>] {
        &self.obstacles
    }

    pub fn edges(&self) -> &[Segment] {
        &self.edges
    }

    /// Returns a copy with an extra obstacle, validated like the rest.
    pub fn with_obstacle(&self, obstacle: Vec<Vec2>) -> Result<Self, GeometryError> {
        let mut obstacles = self.obstacles.clone();
        obstacles.push(obstacle);
        Self::new(self.name.clone(), self.boundary.clone(), obstacles)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.is_finite() && point_in_polygon(&self.boundary, p)
    }

    /// True when `p` is inside the boundary and outside every obstacle.
    pub fn is_free(&self, p: Vec2) -> bool {
        self.contains(p) && !self.obstacles.iter().any(|o| point_in_polygon(o, p))
    }

    /// Distance from `p` to the nearest scene edge.
    pub fn clearance(&self, p: Vec2) -> f64 {
        self.edges
            .iter()
            .map(|e| e.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest point on any scene edge, with the index of that edge.
    pub fn nearest_edge_point(&self, p: Vec2) -> (usize, Vec2, f64) {
        let mut best = (0, self.edges[0].a, f64::INFINITY);
        for (i, e) in self.edges.iter().enumerate() {
            let q = e.closest_point(p);
            let d = p.distance(q);
            if d < best.2 {
                best = (i, q, d);
            }
        }
        best
    }

    /// Whether a disc of `radius` centered at `point` fits in free space.
    pub fn is_navigable(&self, point: Vec2, radius: f64) -> bool {
        self.is_free(point) && self.clearance(point) >= radius - CONTACT_EPS
    }

    /// Minimum distance from the segment `a`-`b` to any scene edge.
    pub fn segment_clearance(&self, a: Vec2, b: Vec2) -> f64 {
        let s = Segment::new(a, b);
        self.edges
            .iter()
            .map(|e| s.distance_to_segment(e))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance to the first boundary/obstacle hit along a ray, clipped to
    /// `max_range`.
    pub fn ray_cast(&self, origin: Vec2, direction: Vec2, max_range: f64) -> Result<f64, GeometryError> {
        if !(max_range > 0.0) {
            return Err(GeometryError::InvalidArgument(format!(
                "max_range must be positive, got {max_range}"
            )));
        }
        let dir = direction
            .normalized()
            .ok_or_else(|| GeometryError::InvalidArgument("ray direction must be non-zero".into()))?;
        if !self.contains(origin) {
            return Err(GeometryError::OutsideBoundary {
                x: origin.x,
                y: origin.y,
            });
        }
        if self.obstacles.iter().any(|o| point_in_polygon(o, origin)) {
            return Ok(0.0);
        }
        let hit = self
            .edges
            .iter()
            .filter_map(|e| e.ray_hit(origin, dir))
            .fold(f64::INFINITY, f64::min);
        Ok(hit.min(max_range))
    }
}

fn dedup_closing(mut poly: Vec<Vec2>) -> Vec<Vec2> {
    poly.dedup();
    if poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    poly
}

fn is_convex_ccw(poly: &[Vec2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| orient(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) >= -1e-12)
}

/// Separating-axis test; touching polygons do not overlap.
fn convex_overlap(a: &[Vec2], b: &[Vec2]) -> bool {
    let separated_by = |poly: &[Vec2]| {
        edges_of(poly).any(|e| {
            let axis = (e.b - e.a).perp();
            let proj = |p: &[Vec2]| {
                p.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let d = axis.dot(*v);
                    (lo.min(d), hi.max(d))
                })
            };
            let (amin, amax) = proj(a);
            let (bmin, bmax) = proj(b);
            amax <= bmin + 1e-12 || bmax <= amin + 1e-12
        })
    };
    !(separated_by(a) || separated_by(b))
}
