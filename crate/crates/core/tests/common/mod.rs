#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use chordguard::geometry::{chord_through, ConvexPolygon, Point};
use chordguard::motion::Pose;
use chordguard::strategy::{GuardLine, StrategyConstants};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn workspace_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("workspaces")
}

pub fn square(side: f64) -> ConvexPolygon {
    ConvexPolygon::rectangle(Point::ORIGIN, Point::new(side, side)).unwrap()
}

/// A guarding configuration: both invariants hold and the evader sits at
/// least the safe margin above the guard line.
#[derive(Debug, Clone, Copy)]
pub struct GuardState {
    pub guard: GuardLine,
    pub pursuer: Pose,
    pub evader: Point,
}

pub fn sample_in(q: &ConvexPolygon, rng: &mut ChaCha8Rng) -> Point {
    let vs = q.vertices();
    let (mut lo, mut hi) = (vs[0], vs[0]);
    for v in vs {
        lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    loop {
        let p = Point::new(rng.random_range(lo.x..=hi.x), rng.random_range(lo.y..=hi.y));
        if q.contains(p, 0.0) {
            return p;
        }
    }
}

/// Draws a guarding state whose guard line runs along `direction`. The
/// evader's height above the line is drawn from `heights`.
pub fn guard_state(
    q: &ConvexPolygon,
    direction: Point,
    heights: std::ops::Range<f64>,
    k: &StrategyConstants,
    rng: &mut ChaCha8Rng,
) -> GuardState {
    loop {
        let base = sample_in(q, rng);
        let chord = chord_through(q, base, direction).unwrap();
        let len = chord.length();
        if len < 2.0 * k.d_guard + 1.0 {
            continue;
        }
        let s = rng.random_range(k.d_guard..len - k.d_guard);
        let proj = chord.point_at(s);
        let n = chord.direction().perp();
        let normal = if rng.random_bool(0.5) { n } else { -n };
        let evader = proj + normal * rng.random_range(heights.clone());
        if !q.contains(evader, 0.0) {
            continue;
        }
        let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = chord.point_at(s + side * k.d_guard);
        let u = chord.direction();
        let theta = u.y.atan2(u.x) + if rng.random_bool(0.5) { 0.0 } else { PI };
        return GuardState { guard: GuardLine { chord, evader_normal: normal }, pursuer: Pose::new(p.x, p.y, theta), evader };
    }
}
