mod common;

use std::f64::consts::{FRAC_PI_4, PI};

use common::{axis_box, brute_clearance, grid_geodesic, navigable, random_scene, ray_march, RADIUS};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sim2real::geometry::{geodesic_distance, resolve_move, CollisionMode, NavGraph, Pose, Scene, Vec2};

fn coda() -> Scene {
    Scene::rectangle("coda", 6.5, 10.0).unwrap()
}

fn coda_with_box() -> Scene {
    coda().with_obstacle(axis_box(2.5, 4.5, 4.0, 5.5)).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, scene: &Scene) -> Vec2 {
    let xs = scene.boundary().iter().map(|v| v.x).fold(0.0, f64::max);
    let ys = scene.boundary().iter().map(|v| v.y).fold(0.0, f64::max);
    Vec2::new(rng.random_range(0.0..xs), rng.random_range(0.0..ys))
}

#[test]
fn ray_cast_hits_the_wall_and_clips() {
    let scene = coda();
    let center = Vec2::new(3.25, 5.0);
    assert!((scene.ray_cast(center, Vec2::new(1.0, 0.0), 10.0).unwrap() - 3.25).abs() < 1e-12);
    assert_eq!(scene.ray_cast(center, Vec2::new(1.0, 0.0), 2.0).unwrap(), 2.0);
    assert!(scene.ray_cast(Vec2::new(-1.0, 5.0), Vec2::new(1.0, 0.0), 10.0).is_err());
}

#[test]
fn ray_cast_matches_ray_march() {
    let scene = coda_with_box();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 300 {
        let origin = random_point(&mut rng, &scene);
        if !common::free(&scene, origin) {
            continue;
        }
        let dir = Vec2::from_angle(rng.random_range(0.0..2.0 * PI));
        let got = scene.ray_cast(origin, dir, 10.0).unwrap();
        let want = ray_march(&scene, origin, dir, 10.0, 0.001);
        assert!((got - want).abs() <= 0.002, "{origin:?} {dir:?}: {got} vs {want}");
        checked += 1;
    }
}

#[test]
fn ray_cast_never_grows_when_obstacles_are_added() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = coda();
    let more = coda_with_box();
    let most = more.with_obstacle(axis_box(0.5, 0.5, 1.5, 1.2)).unwrap();
    for _ in 0..500 {
        let origin = random_point(&mut rng, &base);
        if !common::free(&most, origin) {
            continue;
        }
        let dir = Vec2::from_angle(rng.random_range(0.0..2.0 * PI));
        let a = base.ray_cast(origin, dir, 10.0).unwrap();
        let b = more.ray_cast(origin, dir, 10.0).unwrap();
        let c = most.ray_cast(origin, dir, 10.0).unwrap();
        assert!(b <= a + 1e-12 && c <= b + 1e-12);
    }
}

#[test]
fn navigability_examples() {
    let scene = coda();
    assert!(scene.is_navigable(Vec2::new(3.25, 5.0), RADIUS));
    assert!(!scene.is_navigable(Vec2::new(0.1, 5.0), RADIUS));
}

#[test]
fn navigability_matches_clearance_oracle() {
    let scene = coda_with_box();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let p = random_point(&mut rng, &scene);
        assert_eq!(scene.is_navigable(p, RADIUS), navigable(&scene, p, RADIUS), "{p:?}");
        if common::free(&scene, p) {
            assert!((scene.clearance(p) - brute_clearance(&scene, p)).abs() < 1e-12);
        }
    }
}

#[test]
fn free_space_move_is_exact() {
    let scene = coda();
    let pose = Pose::new(Vec2::new(3.0, 5.0), 0.3);
    let d = Vec2::new(0.2, -0.15);
    for mode in [CollisionMode::Slide, CollisionMode::Stop] {
        let r = resolve_move(&scene, &pose, d, RADIUS, mode).unwrap();
        assert!(!r.collided);
        assert_eq!(r.position, pose.position + d);
    }
}

#[test]
fn diagonal_push_into_wall_slides_by_the_tangential_part() {
    let scene = coda();
    // touching the west wall
    let pose = Pose::new(Vec2::new(RADIUS, 5.0), PI);
    let d = Vec2::from_angle(PI - FRAC_PI_4) * 0.25;
    let slid = resolve_move(&scene, &pose, d, RADIUS, CollisionMode::Slide).unwrap();
    assert!(slid.collided);
    let moved = slid.position - pose.position;
    assert!((moved.y - 0.25 * FRAC_PI_4.cos()).abs() < 1e-6, "{moved:?}");
    assert!(moved.x.abs() < 1e-6);
    let stopped = resolve_move(&scene, &pose, d, RADIUS, CollisionMode::Stop).unwrap();
    assert!(stopped.collided);
    assert_eq!(stopped.position, pose.position);
}

#[test]
fn non_navigable_start_is_a_domain_error() {
    let pose = Pose::new(Vec2::new(0.05, 5.0), 0.0);
    assert!(resolve_move(&coda(), &pose, Vec2::new(0.1, 0.0), RADIUS, CollisionMode::Slide).is_err());
}

fn scenes() -> Vec<Scene> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut out = vec![coda_with_box()];
    out.extend((0..4).map(|i| random_scene(&mut rng, i).0));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn moves_stay_navigable_and_bounded(
        which in 0usize..5,
        fx in 0.0f64..1.0,
        fy in 0.0f64..1.0,
        angle in 0.0f64..(2.0 * PI),
        len in 0.0f64..0.4,
        slide in any::<bool>(),
    ) {
        thread_local!(static SCENES: Vec<Scene> = scenes());
        SCENES.with(|scenes| {
            let scene = &scenes[which];
            let w = scene.boundary().iter().map(|v| v.x).fold(0.0, f64::max);
            let h = scene.boundary().iter().map(|v| v.y).fold(0.0, f64::max);
            let start = Vec2::new(fx * w, fy * h);
            if !scene.is_navigable(start, RADIUS) {
                return Ok(());
            }
            let d = Vec2::from_angle(angle) * len;
            let mode = if slide { CollisionMode::Slide } else { CollisionMode::Stop };
            let r = resolve_move(scene, &Pose::new(start, 0.0), d, RADIUS, mode).unwrap();
            prop_assert!(common::free(scene, r.position));
            prop_assert!(brute_clearance(scene, r.position) >= RADIUS - 1e-6);
            prop_assert!(r.position.distance(start) <= len + 1e-6);
            if r.collided && !slide {
                prop_assert_eq!(r.position, start);
            }
            Ok(())
        })?;
    }
}

#[test]
fn geodesic_examples() {
    let scene = coda();
    let a = Vec2::new(1.0, 1.0);
    let b = Vec2::new(5.0, 8.0);
    assert!((geodesic_distance(&scene, a, b, RADIUS).unwrap() - a.distance(b)).abs() < 1e-12);
    assert_eq!(geodesic_distance(&scene, a, a, RADIUS).unwrap(), 0.0);
    assert!(geodesic_distance(&scene, Vec2::new(0.01, 1.0), b, RADIUS).is_err());
}

#[test]
fn geodesic_around_a_box_matches_grid_search() {
    let scene = coda_with_box();
    let a = Vec2::new(3.25, 3.5);
    let b = Vec2::new(3.0, 6.5);
    let got = geodesic_distance(&scene, a, b, RADIUS).unwrap();
    let want = grid_geodesic(&scene, a, b, RADIUS, 0.01, 4);
    assert!(got > a.distance(b) + 0.1);
    assert!((got - want).abs() / want < 0.02, "{got} vs {want}");
}

#[test]
fn walled_off_goal_is_unreachable() {
    // a full-height partition splits the room
    let scene = Scene::new(
        "split",
        vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(4.0, 0.0),
            Vec2::new(4.0, 3.0),
            Vec2::new(0.0, 3.0),
        ],
        vec![axis_box(1.9, 0.1, 2.1, 2.9)],
    )
    .unwrap();
    let d = geodesic_distance(&scene, Vec2::new(1.0, 1.5), Vec2::new(3.0, 1.5), RADIUS).unwrap();
    assert_eq!(d, f64::INFINITY);
}

#[test]
fn geodesic_is_symmetric_and_bounded_by_euclid() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for scene in scenes() {
        let graph = NavGraph::build(&scene, RADIUS).unwrap();
        let mut pairs = 0;
        while pairs < 1000 {
            let a = random_point(&mut rng, &scene);
            let b = random_point(&mut rng, &scene);
            if !scene.is_navigable(a, RADIUS) || !scene.is_navigable(b, RADIUS) {
                continue;
            }
            let ab = graph.distance(a, b).unwrap();
            let ba = graph.distance(b, a).unwrap();
            if ab.is_finite() {
                assert!(ab >= a.distance(b) - 1e-12);
                assert!((ab - ba).abs() <= 1e-9 * ab.max(1.0), "{ab} vs {ba}");
            } else {
                assert_eq!(ba, f64::INFINITY);
            }
            pairs += 1;
        }
    }
}

#[test]
fn pose_heading_is_normalized() {
    for h in [-7.0, -PI, 0.0, 2.0 * PI, 13.0] {
        let p = Pose::new(Vec2::ZERO, h);
        assert!((0.0..2.0 * PI).contains(&p.heading()), "{h}");
    }
}
