//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sim2real::geometry::{Scene, Vec2};

pub const RADIUS: f64 = 0.175;

/// Textbook two-pass sample Pearson coefficient.
pub fn naive_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx.sqrt() * syy.sqrt())
}

/// Pairs ordered differently by the two vectors, ties in exactly one
/// vector included.
pub fn naive_reversals(xs: &[f64], ys: &[f64]) -> usize {
    let mut count = 0;
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let a = (xs[i] - xs[j]).signum() * f64::from(xs[i] != xs[j]);
            let b = (ys[i] - ys[j]).signum() * f64::from(ys[i] != ys[j]);
            if a != b {
                count += 1;
            }
        }
    }
    count
}

/// Rectangle centered at `c`, rotated by `angle`.
pub fn rotated_box(c: Vec2, half_w: f64, half_h: f64, angle: f64) -> Vec<Vec2> {
    [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(sx, sy)| c + Vec2::new(sx * half_w, sy * half_h).rotate(angle))
        .collect()
}

pub fn axis_box(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Vec2> {
    vec![
        Vec2::new(x0, y0),
        Vec2::new(x1, y0),
        Vec2::new(x1, y1),
        Vec2::new(x0, y1),
    ]
}

fn segment_distance(a: (Vec2, Vec2), b: (Vec2, Vec2)) -> f64 {
    // disjoint polygons: the minimum is attained at an endpoint
    [
        point_segment(a.0, b.0, b.1),
        point_segment(a.1, b.0, b.1),
        point_segment(b.0, a.0, a.1),
        point_segment(b.1, a.0, a.1),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

fn edges(poly: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    (0..poly.len()).map(move |k| (poly[k], poly[(k + 1) % poly.len()]))
}

/// Narrowest gap between any two polygons of the scene.
pub fn narrowest_gap(scene: &Scene) -> f64 {
    let polys: Vec<&[Vec2]> = std::iter::once(scene.boundary())
        .chain(scene.obstacles().iter().map(Vec::as_slice))
        .collect();
    let mut best = f64::INFINITY;
    for i in 0..polys.len() {
        for j in (i + 1)..polys.len() {
            for a in edges(polys[i]) {
                for b in edges(polys[j]) {
                    best = best.min(segment_distance(a, b));
                }
            }
        }
    }
    best
}

/// A random room with a few rotated boxes plus two navigable grid-aligned
/// endpoints at least 1.5 m apart. Passages barely wider than the robot are
/// rejected: a 1 cm lattice cannot resolve a corridor of a few millimetres.
pub fn random_scene(rng: &mut ChaCha8Rng, index: usize) -> (Scene, Vec2, Vec2) {
    let (w, h) = (4.0, 3.0);
    loop {
        let mut scene = Scene::rectangle(format!("random_{index}"), w, h).unwrap();
        let boxes = rng.random_range(1..=4);
        for _ in 0..boxes {
            let c = Vec2::new(rng.random_range(0.6..w - 0.6), rng.random_range(0.6..h - 0.6));
            let b = rotated_box(
                c,
                rng.random_range(0.1..0.5),
                rng.random_range(0.1..0.5),
                rng.random_range(0.0..std::f64::consts::PI),
            );
            if let Ok(s) = scene.with_obstacle(b) {
                let gap = narrowest_gap(&s) - 2.0 * RADIUS;
                if !(-0.02..0.03).contains(&gap) {
                    scene = s;
                }
            }
        }
        let point = |rng: &mut ChaCha8Rng| {
            (0..200).find_map(|_| {
                let p = Vec2::new(
                    (rng.random_range(0.2..w - 0.2) * 100.0_f64).round() / 100.0,
                    (rng.random_range(0.2..h - 0.2) * 100.0_f64).round() / 100.0,
                );
                navigable(&scene, p, RADIUS).then_some(p)
            })
        };
        let (Some(a), Some(b)) = (point(rng), point(rng)) else {
            continue;
        };
        if a.distance(b) >= 1.5 {
            return (scene, a, b);
        }
    }
}

/// Brute-force geodesic on a `res`-spaced lattice over the scene's bounding
/// box. Moves use every primitive offset up to `reach` cells, so the
/// direction set is fine enough that lattice paths are within ~1% of the
/// continuous optimum. `a` and `b` must lie on lattice points.
pub fn grid_geodesic(scene: &Scene, a: Vec2, b: Vec2, radius: f64, res: f64, reach: i64) -> f64 {
    let xs: Vec<f64> = scene.boundary().iter().map(|v| v.x).collect();
    let ys: Vec<f64> = scene.boundary().iter().map(|v| v.y).collect();
    let x0 = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let y0 = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let nx = ((xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x0) / res).round() as i64 + 1;
    let ny = ((ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y0) / res).round() as i64 + 1;
    let at = |i: i64, j: i64| Vec2::new(x0 + i as f64 * res, y0 + j as f64 * res);
    let idx = |i: i64, j: i64| (j * nx + i) as usize;
    let free: Vec<bool> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| navigable(scene, at(i, j), radius))
        .collect();
    let cell = |p: Vec2| (((p.x - x0) / res).round() as i64, ((p.y - y0) / res).round() as i64);

    let gcd = |mut a: i64, mut b: i64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    let offsets: Vec<(i64, i64, f64)> = (-reach..=reach)
        .flat_map(|dx| (-reach..=reach).map(move |dy| (dx, dy)))
        .filter(|&(dx, dy)| (dx, dy) != (0, 0) && gcd(dx, dy) == 1)
        .map(|(dx, dy)| (dx, dy, res * ((dx * dx + dy * dy) as f64).sqrt()))
        .collect();

    let (si, sj) = cell(a);
    let (ti, tj) = cell(b);
    let mut dist = vec![f64::INFINITY; free.len()];
    let mut heap = BinaryHeap::new();
    dist[idx(si, sj)] = 0.0;
    heap.push((Reverse(OrdF64(0.0)), si, sj));
    while let Some((Reverse(OrdF64(d)), i, j)) = heap.pop() {
        if (i, j) == (ti, tj) {
            return d;
        }
        if d > dist[idx(i, j)] {
            continue;
        }
        'moves: for &(dx, dy, w) in &offsets {
            let (ni, nj) = (i + dx, j + dy);
            if ni < 0 || nj < 0 || ni >= nx || nj >= ny || !free[idx(ni, nj)] {
                continue;
            }
            // the lattice cells nearest the segment must all be free
            let steps = dx.abs().max(dy.abs());
            for k in 1..steps {
                let ci = i as f64 + dx as f64 * k as f64 / steps as f64;
                let cj = j as f64 + dy as f64 * k as f64 / steps as f64;
                for (fi, fj) in [
                    (ci.floor(), cj.floor()),
                    (ci.ceil(), cj.ceil()),
                    (ci.floor(), cj.ceil()),
                    (ci.ceil(), cj.floor()),
                ] {
                    if !free[idx(fi as i64, fj as i64)] {
                        continue 'moves;
                    }
                }
            }
            let nd = d + w;
            if nd < dist[idx(ni, nj)] {
                dist[idx(ni, nj)] = nd;
                heap.push((Reverse(OrdF64(nd)), ni, nj));
            }
        }
    }
    f64::INFINITY
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Even-odd point-in-polygon test.
pub fn inside(poly: &[Vec2], p: Vec2) -> bool {
    let mut odd = false;
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            odd = !odd;
        }
    }
    odd
}

pub fn free(scene: &Scene, p: Vec2) -> bool {
    inside(scene.boundary(), p) && !scene.obstacles().iter().any(|o| inside(o, p))
}

pub fn point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let t = (((p.x - a.x) * abx + (p.y - a.y) * aby) / (abx * abx + aby * aby)).clamp(0.0, 1.0);
    ((a.x + t * abx - p.x).powi(2) + (a.y + t * aby - p.y).powi(2)).sqrt()
}

/// Oracle counterpart of `Scene::is_navigable`.
pub fn navigable(scene: &Scene, p: Vec2, radius: f64) -> bool {
    free(scene, p) && brute_clearance(scene, p) >= radius - 1e-6
}

/// Minimum distance from `p` to every polygon edge of the scene.
pub fn brute_clearance(scene: &Scene, p: Vec2) -> f64 {
    std::iter::once(scene.boundary())
        .chain(scene.obstacles().iter().map(Vec::as_slice))
        .flat_map(|poly| (0..poly.len()).map(move |k| (poly[k], poly[(k + 1) % poly.len()])))
        .map(|(a, b)| point_segment(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Distance along the ray, marched in `step` increments, to the first
/// sample that leaves free space.
pub fn ray_march(scene: &Scene, origin: Vec2, dir: Vec2, max_range: f64, step: f64) -> f64 {
    let mut t = 0.0;
    while t < max_range {
        let next = t + step;
        if !free(scene, origin + dir * next) {
            return t;
        }
        t = next;
    }
    max_range
}
