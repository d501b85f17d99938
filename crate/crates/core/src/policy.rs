//! Built-in evader behaviours.
//!
//! Automatic policies pick among a fixed fan of candidate moves: staying put,
//! plus 72 headings at full and half length, each cut short at the arena
//! boundary. Moves that would sweep into the capture disk are avoided while
//! any safe candidate exists.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{GameState, Phase};
use crate::geometry::{min_distance_point_to_swept_segment, ConvexPolygon, Point, Segment, EPS};
use crate::motion::Pose;

const HEADINGS: usize = 72;
const FRACTIONS: [f64; 2] = [1.0, 0.5];
const SAFETY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    Random,
    /// Maximizes the distance to the pursuer.
    GreedyRunner,
    /// Slides sideways just past the follow threshold, as high as possible.
    ThresholdDancer,
    /// Heads for the arena corner farthest from the pursuer.
    CornerHugger,
    /// Pushes its chord projection away from the pursuer as fast as possible.
    ProjectionPusher,
    /// Walks through the waypoints in order, then stays. An empty list never moves.
    Scripted(Vec<Point>),
    /// Moves come from outside the engine.
    External,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown policy '{0}' (expected random, greedy_runner, threshold_dancer, corner_hugger, projection_pusher, stationary, scripted:X,Y;X,Y..., external)")]
pub struct UnknownPolicy(pub String);

impl FromStr for PolicyKind {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s {
            "random" => PolicyKind::Random,
            "greedy_runner" => PolicyKind::GreedyRunner,
            "threshold_dancer" => PolicyKind::ThresholdDancer,
            "corner_hugger" => PolicyKind::CornerHugger,
            "projection_pusher" => PolicyKind::ProjectionPusher,
            "stationary" => PolicyKind::Scripted(Vec::new()),
            "external" => PolicyKind::External,
            _ => {
                let Some(list) = s.strip_prefix("scripted:") else {
                    return Err(UnknownPolicy(s.to_string()));
                };
                let mut points = Vec::new();
                for pair in list.split(';').filter(|p| !p.trim().is_empty()) {
                    let xy: Vec<f64> = pair
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| UnknownPolicy(s.to_string()))?;
                    let [x, y] = xy[..] else {
                        return Err(UnknownPolicy(s.to_string()));
                    };
                    points.push(Point::new(x, y));
                }
                PolicyKind::Scripted(points)
            }
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Random => f.write_str("random"),
            PolicyKind::GreedyRunner => f.write_str("greedy_runner"),
            PolicyKind::ThresholdDancer => f.write_str("threshold_dancer"),
            PolicyKind::CornerHugger => f.write_str("corner_hugger"),
            PolicyKind::ProjectionPusher => f.write_str("projection_pusher"),
            PolicyKind::Scripted(points) if points.is_empty() => f.write_str("stationary"),
            PolicyKind::Scripted(points) => {
                f.write_str("scripted:")?;
                for (i, p) in points.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{},{}", p.x, p.y)?;
                }
                Ok(())
            }
            PolicyKind::External => f.write_str("external"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvaderPolicy {
    pub kind: PolicyKind,
    rng: ChaCha8Rng,
    cursor: usize,
    /// Current sideways direction of the threshold dancer, +1 or -1 along the chord.
    dance_dir: f64,
}

impl EvaderPolicy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Self { kind, rng: ChaCha8Rng::seed_from_u64(seed), cursor: 0, dance_dir: 0.0 }
    }

    pub fn external() -> Self {
        Self::new(PolicyKind::External, 0)
    }

    pub fn is_external(&self) -> bool {
        self.kind == PolicyKind::External
    }

    /// Next evader target, or `None` for an external policy.
    pub fn propose(&mut self, state: &GameState) -> Option<Point> {
        let e = state.evader;
        let target = match self.kind.clone() {
            PolicyKind::External => return None,
            PolicyKind::Scripted(points) => self.scripted(state, &points),
            PolicyKind::Random => {
                let pool = safe_candidates(state);
                pool[self.rng.random_range(0..pool.len())]
            }
            PolicyKind::GreedyRunner => greedy(state),
            PolicyKind::CornerHugger => {
                let p = state.pursuer.position();
                let corner = state
                    .q
                    .vertices()
                    .iter()
                    .copied()
                    .max_by(|a, b| a.distance(p).total_cmp(&b.distance(p)))
                    .unwrap_or(e);
                best_by(&safe_candidates(state), |c| -c.distance(corner))
            }
            PolicyKind::ProjectionPusher => {
                let (origin, dir) = guarded_axis(state);
                let away = if (e - origin).dot(dir) >= (state.pursuer.position() - origin).dot(dir) { 1.0 } else { -1.0 };
                best_by(&safe_candidates(state), |c| (c - e).dot(dir) * away)
            }
            PolicyKind::ThresholdDancer => self.dance(state),
        };
        debug_assert!(target.distance(e) <= state.epsilon + 1e-9);
        Some(target)
    }

    fn scripted(&mut self, state: &GameState, points: &[Point]) -> Point {
        let e = state.evader;
        let Some(&waypoint) = points.get(self.cursor) else {
            return e;
        };
        let gap = waypoint.distance(e);
        let reach = if gap <= state.epsilon {
            self.cursor += 1;
            gap
        } else {
            state.epsilon
        };
        if gap <= EPS {
            return e;
        }
        let dir = (waypoint - e) * (1.0 / gap);
        let limit = state.q.clip_line(e, dir).map_or(0.0, |(_, hi)| hi.max(0.0));
        e + dir * reach.min(limit)
    }

    fn dance(&mut self, state: &GameState) -> Point {
        let Some(guard) = state.guard.filter(|_| state.phase == Phase::Guarding) else {
            return greedy(state);
        };
        let e = state.evader;
        let p = state.pursuer.position();
        let u = guard.forward();
        let n = guard.evader_normal;
        if self.dance_dir == 0.0 {
            self.dance_dir = if (e - p).dot(u) >= 0.0 { 1.0 } else { -1.0 };
        }
        let stride = (state.constants.k_h * 1.2).min(state.epsilon);
        let rise = (state.epsilon * state.epsilon - stride * stride).max(0.0).sqrt();
        for _ in 0..2 {
            let side = u * (stride * self.dance_dir);
            for k in 0..=8 {
                let c = e + side + n * (rise * (1.0 - k as f64 / 4.0));
                if state.q.contains(c, EPS) && is_safe(state, c) {
                    return c;
                }
            }
            self.dance_dir = -self.dance_dir;
        }
        greedy(state)
    }
}

fn greedy(state: &GameState) -> Point {
    let p = state.pursuer.position();
    best_by(&safe_candidates(state), |c| c.distance(p))
}

/// Line the pursuer is guarding or heading for, as origin and unit direction.
fn guarded_axis(state: &GameState) -> (Point, Point) {
    match state.guard {
        Some(g) => (g.chord.a, g.forward()),
        None => (state.longest_chord.a, state.longest_chord.direction()),
    }
}

/// First candidate with the largest score.
fn best_by(candidates: &[Point], score: impl Fn(Point) -> f64) -> Point {
    let mut best = candidates[0];
    let mut best_score = score(best);
    for &c in &candidates[1..] {
        let s = score(c);
        if s > best_score {
            best = c;
            best_score = s;
        }
    }
    best
}

fn is_safe(state: &GameState, target: Point) -> bool {
    let path = Segment::new(state.evader, target);
    min_distance_point_to_swept_segment(state.pursuer.position(), &path) > state.constants.r_capture + SAFETY_SLACK
}

/// Legal candidate moves in a fixed order, starting with staying put.
pub fn candidate_moves(q: &ConvexPolygon, evader: Point, epsilon: f64) -> Vec<Point> {
    let mut out = vec![evader];
    for i in 0..HEADINGS {
        let dir = Point::from_angle(2.0 * PI * i as f64 / HEADINGS as f64);
        let Some((_, hi)) = q.clip_line(evader, dir) else {
            continue;
        };
        for frac in FRACTIONS {
            let len = (frac * epsilon).min(hi);
            if len <= EPS {
                continue;
            }
            let c = evader + dir * len;
            if q.contains(c, EPS) {
                out.push(c);
            }
        }
    }
    out
}

/// Safe candidates, or all candidates when none is safe. Never empty.
fn safe_candidates(state: &GameState) -> Vec<Point> {
    let all = candidate_moves(&state.q, state.evader, state.epsilon);
    let safe: Vec<Point> = all.iter().copied().filter(|&c| is_safe(state, c)).collect();
    if safe.is_empty() {
        all
    } else {
        safe
    }
}

/// Seeded start positions inside `q` at least `min_separation` apart.
pub fn random_starts(q: &ConvexPolygon, min_separation: f64, seed: u64) -> (Pose, Point) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = bounding_box(q);
    let sample = |rng: &mut ChaCha8Rng| loop {
        let p = Point::new(rng.random_range(lo.x..=hi.x), rng.random_range(lo.y..=hi.y));
        if q.depth(p) >= 0.0 {
            return p;
        }
    };
    loop {
        let p = sample(&mut rng);
        let theta = rng.random_range(-PI..PI);
        for _ in 0..64 {
            let e = sample(&mut rng);
            if e.distance(p) > min_separation {
                return (Pose::new(p.x, p.y, theta), e);
            }
        }
    }
}

fn bounding_box(q: &ConvexPolygon) -> (Point, Point) {
    let vs = q.vertices();
    let mut lo = vs[0];
    let mut hi = vs[0];
    for v in vs {
        lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    (lo, hi)
}
