//! Deterministic turn loop.
//!
//! The evader moves first in every round; the pursuer replies. Capture is
//! checked continuously along each mover's straight swept path.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    erode, longest_chord, min_distance_point_to_swept_segment, Chord, ConvexPolygon, GeometryError, Point, Segment, EPS,
};
use crate::motion::{execute, parallel_error, MotionError, Pose, SpeedLimits};
use crate::policy::EvaderPolicy;
use crate::strategy::{plan_turn, DecisionCase, GuardLine, StrategyConstants, StrategyError, INVARIANT_TOLERANCE};
use crate::trace::TraceRecord;

/// Radius of each player's disk; the arena is eroded by this much.
pub const PLAYER_RADIUS: f64 = 1.0;

/// Slack on the evader's move length.
pub const MOVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("workspace is too small for unit-disk players")]
    EmptyWorkspace,
    #[error("players start {distance} apart, inside the capture radius")]
    StartInCollision { distance: f64 },
    #[error("{who} start position lies outside the playing space")]
    StartOutside { who: Actor },
    #[error("turn duration must be in (0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("illegal evader move: {0}")]
    IllegalMove(String),
    #[error("it is not the {0}'s turn")]
    OutOfTurn(Actor),
    #[error("the game is already over")]
    GameOver,
    #[error("the evader is controlled externally")]
    ExternalPolicy,
    #[error("planner failure: {0}")]
    Planner(#[from] StrategyError),
    #[error("motion failure: {0}")]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Geometry(GeometryError),
}

impl From<GeometryError> for GameError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::EmptyWorkspace => GameError::EmptyWorkspace,
            other => GameError::Geometry(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Evader,
    Pursuer,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Actor::Evader => "evader",
            Actor::Pursuer => "pursuer",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Driving onto the longest chord.
    Approach,
    /// On the longest chord, chasing the evader's projection.
    Establishing,
    Guarding,
    Captured,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Phase::Approach => "approach",
            Phase::Establishing => "establishing",
            Phase::Guarding => "guarding",
            Phase::Captured => "captured",
        })
    }
}

/// Counters kept alongside the state for reporting.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GameStats {
    /// Round after which the pursuer first stood aligned on the longest chord.
    pub on_chord_round: Option<u64>,
    /// Round after which both guarding invariants first held.
    pub guarding_round: Option<u64>,
    pub capture_round: Option<u64>,
    pub captured_by: Option<Actor>,
    pub zigzag_count: u64,
    pub follow_count: u64,
    pub breach_count: u64,
    pub last_case: Option<DecisionCase>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Invariant1Violation,
    Invariant2Violation,
    EvaderOnGuardedSide,
    PursuerOutside,
    BandHeightIncreased,
    AliveStateInconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub step: u64,
    pub measured: f64,
}

#[derive(Debug, Clone)]
pub struct GameState {
    /// Playing space for the players' centers.
    pub q: ConvexPolygon,
    /// Original workspace.
    pub w: ConvexPolygon,
    pub longest_chord: Chord,
    pub pursuer: Pose,
    pub evader: Point,
    /// Evader position at the start of the current round.
    pub evader_turn_start: Point,
    pub guard: Option<GuardLine>,
    pub phase: Phase,
    pub to_move: Actor,
    /// Half-turns played.
    pub step: u64,
    /// Completed rounds (pursuer turns).
    pub round: u64,
    pub epsilon: f64,
    pub rng_seed: u64,
    pub constants: StrategyConstants,
    pub limits: SpeedLimits,
    pub policy: EvaderPolicy,
    pub band_height: Option<f64>,
    pub prev_band_height: Option<f64>,
    pub min_distance: f64,
    pub stats: GameStats,
    pub violations: Vec<Violation>,
    pub event_log: Vec<TraceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub captured: bool,
    /// The round limit was reached before capture.
    pub bound_exceeded: bool,
    pub rounds: u64,
}

/// Sets up a game on the workspace `w` (players are unit disks).
pub fn new_game(
    w: ConvexPolygon,
    pursuer_start: Pose,
    evader_start: Point,
    policy: EvaderPolicy,
    epsilon: f64,
    seed: u64,
) -> Result<GameState, GameError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(GameError::InvalidEpsilon(epsilon));
    }
    let q = erode(&w, PLAYER_RADIUS)?;
    if !q.contains(pursuer_start.position(), EPS) {
        return Err(GameError::StartOutside { who: Actor::Pursuer });
    }
    if !q.contains(evader_start, EPS) {
        return Err(GameError::StartOutside { who: Actor::Evader });
    }
    let constants = StrategyConstants::for_turn_duration(epsilon)?;
    let distance = pursuer_start.position().distance(evader_start);
    if distance <= constants.r_capture {
        return Err(GameError::StartInCollision { distance });
    }
    let longest_chord = longest_chord(&q);
    Ok(GameState {
        q,
        w,
        longest_chord,
        pursuer: pursuer_start,
        evader: evader_start,
        evader_turn_start: evader_start,
        guard: None,
        phase: Phase::Approach,
        to_move: Actor::Evader,
        step: 0,
        round: 0,
        epsilon,
        rng_seed: seed,
        constants,
        limits: SpeedLimits::default(),
        policy,
        band_height: None,
        prev_band_height: None,
        min_distance: distance,
        stats: GameStats::default(),
        violations: Vec::new(),
        event_log: Vec::new(),
    })
}

/// Round limit from the capture bound:
/// `ceil(diam) + ceil(ceil(diam / k_h) * ceil(diam / k_v) / epsilon^2)`.
pub fn theoretical_step_bound(q: &ConvexPolygon, constants: &StrategyConstants, epsilon: f64) -> u64 {
    step_bound_for_diameter(q.diameter(), constants, epsilon)
}

pub fn step_bound_for_diameter(diam: f64, constants: &StrategyConstants, epsilon: f64) -> u64 {
    let establish = diam.ceil();
    let horizontal = (diam / constants.k_h).ceil();
    let vertical = (diam / constants.k_v).ceil();
    (establish + (horizontal * vertical / (epsilon * epsilon)).ceil()) as u64
}

impl GameState {
    pub fn is_captured(&self) -> bool {
        self.phase == Phase::Captured
    }

    pub fn diameter(&self) -> f64 {
        self.longest_chord.length()
    }

    /// Rounds spent guarding before capture (or so far).
    pub fn rounds_since_guarding(&self) -> Option<u64> {
        let start = self.stats.guarding_round?;
        Some(self.stats.capture_round.unwrap_or(self.round) - start)
    }

    /// Evader turns between reaching the longest chord and either
    /// establishing the guard or capturing the evader, whichever came first.
    pub fn establishment_rounds(&self) -> Option<u64> {
        let start = self.stats.on_chord_round?;
        let end = self.stats.guarding_round.or(self.stats.capture_round)?;
        Some(end - start)
    }

    fn record(&mut self, actor: Actor, case: Option<DecisionCase>, shift: Option<f64>, v_progress: f64) {
        let (x, y, theta) = match actor {
            Actor::Evader => (self.evader.x, self.evader.y, None),
            Actor::Pursuer => (self.pursuer.x, self.pursuer.y, Some(self.pursuer.theta)),
        };
        self.event_log.push(TraceRecord {
            step: self.step,
            actor,
            x,
            y,
            theta,
            case,
            shift,
            v_progress,
            band_height: self.band_height,
            captured: self.is_captured(),
        });
    }

    fn capture(&mut self, by: Actor) {
        self.phase = Phase::Captured;
        self.stats.captured_by = Some(by);
        self.stats.capture_round = Some(self.round);
    }

    /// Checks an evader move without applying it.
    pub fn validate_evader_move(&self, target: Point) -> Result<(), GameError> {
        if self.is_captured() {
            return Err(GameError::GameOver);
        }
        if self.to_move != Actor::Evader {
            return Err(GameError::OutOfTurn(Actor::Evader));
        }
        if !target.is_finite() {
            return Err(GameError::IllegalMove("non-finite target".into()));
        }
        let len = self.evader.distance(target);
        if len > self.epsilon + MOVE_TOLERANCE {
            return Err(GameError::IllegalMove(format!("move length {len} exceeds {}", self.epsilon)));
        }
        if !self.q.contains(target, EPS) {
            return Err(GameError::IllegalMove(format!("target {target} is outside the playing space")));
        }
        Ok(())
    }

    /// Moves the evader straight to `target`.
    pub fn evader_turn(&mut self, target: Point) -> Result<(), GameError> {
        self.validate_evader_move(target)?;
        let path = Segment::new(self.evader, target);
        let closest = min_distance_point_to_swept_segment(self.pursuer.position(), &path);
        self.evader_turn_start = self.evader;
        self.evader = target;
        self.min_distance = self.min_distance.min(closest);
        self.step += 1;
        self.to_move = Actor::Pursuer;
        if closest <= self.constants.r_capture {
            self.capture(Actor::Evader);
        }
        self.record(Actor::Evader, None, None, 0.0);
        Ok(())
    }

    /// Plans and executes the pursuer's reply, then runs the monitors.
    pub fn pursuer_turn(&mut self) -> Result<DecisionCase, GameError> {
        if self.is_captured() {
            return Err(GameError::GameOver);
        }
        if self.to_move != Actor::Pursuer {
            return Err(GameError::OutOfTurn(Actor::Pursuer));
        }
        let decision = plan_turn(self, &self.constants)?;
        let (pose, swept) = execute(self.pursuer, &decision.plan, &self.limits, self.epsilon)?;

        let closest = swept
            .iter()
            .map(|s| min_distance_point_to_swept_segment(self.evader, s))
            .fold(pose.position().distance(self.evader), f64::min);
        for s in &swept {
            for p in [s.a, s.b] {
                if !self.q.contains(p, 1e-7) {
                    self.violations.push(Violation {
                        kind: ViolationKind::PursuerOutside,
                        step: self.step + 1,
                        measured: -self.q.depth(p),
                    });
                }
            }
        }

        let old_guard = self.guard;
        self.pursuer = pose;
        self.min_distance = self.min_distance.min(closest);
        self.step += 1;
        self.round += 1;
        self.to_move = Actor::Evader;

        let mut v_progress = 0.0;
        match decision.case {
            DecisionCase::Approach => {
                let on_chord = self.longest_chord.segment().distance_to(pose.position()) <= EPS;
                if on_chord && parallel_error(pose.theta, self.longest_chord.direction()) <= EPS {
                    self.phase = Phase::Establishing;
                    self.stats.on_chord_round = Some(self.round);
                }
            }
            DecisionCase::Establishing => {
                if let Some(g) = decision.new_guard_line {
                    self.guard = Some(g);
                    self.phase = Phase::Guarding;
                    self.stats.guarding_round = Some(self.round);
                    self.band_height = Some(g.band_height(&self.q));
                }
            }
            DecisionCase::ZigzagNegative | DecisionCase::ZigzagSmallPositive => {
                self.stats.zigzag_count += 1;
                if let (Some(old), Some(new)) = (old_guard, decision.new_guard_line) {
                    v_progress = old.height(new.chord.a);
                    self.guard = Some(new);
                }
            }
            DecisionCase::HorizontalFollow => self.stats.follow_count += 1,
            DecisionCase::BreachCapture => self.stats.breach_count += 1,
        }
        if self.phase == Phase::Guarding && decision.case != DecisionCase::Establishing {
            if let Some(g) = self.guard {
                self.prev_band_height = self.band_height;
                self.band_height = Some(g.band_height(&self.q));
            }
        }
        self.stats.last_case = Some(decision.case);

        if closest <= self.constants.r_capture {
            self.capture(Actor::Pursuer);
        }
        self.record(Actor::Pursuer, Some(decision.case), decision.shift, v_progress);
        if !self.is_captured() {
            let found = monitors(self);
            self.violations.extend(found);
        }
        Ok(decision.case)
    }

    /// Alternates policy-driven evader turns and pursuer turns until capture
    /// or until `max_rounds` rounds have been played in total.
    pub fn run(&mut self, max_rounds: u64) -> Result<RunOutcome, GameError> {
        while !self.is_captured() && self.round < max_rounds {
            if self.to_move == Actor::Evader {
                let mut policy = std::mem::replace(&mut self.policy, EvaderPolicy::external());
                let proposal = policy.propose(self);
                self.policy = policy;
                let target = proposal.ok_or(GameError::ExternalPolicy)?;
                self.evader_turn(target)?;
                if self.is_captured() {
                    break;
                }
            }
            self.pursuer_turn()?;
        }
        Ok(RunOutcome {
            captured: self.is_captured(),
            bound_exceeded: !self.is_captured(),
            rounds: self.round,
        })
    }

    /// Runs with the default limit [`theoretical_step_bound`].
    pub fn run_to_bound(&mut self) -> Result<RunOutcome, GameError> {
        let bound = theoretical_step_bound(&self.q, &StrategyConstants::default(), self.epsilon);
        self.run(bound)
    }
}

/// Invariant checks at an evader-turn boundary while guarding.
pub fn monitors(state: &GameState) -> Vec<Violation> {
    let mut out = Vec::new();
    let (Phase::Guarding, Some(guard)) = (state.phase, state.guard) else {
        return out;
    };
    let k = &state.constants;
    let step = state.step;
    let mut flag = |kind, measured| out.push(Violation { kind, step, measured });

    let p = state.pursuer.position();
    let heading_err = parallel_error(state.pursuer.theta, guard.forward());
    if heading_err > INVARIANT_TOLERANCE {
        flag(ViolationKind::Invariant1Violation, heading_err);
    }
    let proj = guard.project(state.evader);
    let guard_gap = p.distance(proj);
    if (guard_gap - k.d_guard).abs() > INVARIANT_TOLERANCE {
        flag(ViolationKind::Invariant2Violation, guard_gap);
    }
    let height = guard.height(state.evader);
    if height <= 0.0 {
        flag(ViolationKind::EvaderOnGuardedSide, height);
    }
    if !state.q.contains(p, 1e-7) {
        flag(ViolationKind::PursuerOutside, -state.q.depth(p));
    }
    if let (Some(prev), Some(now)) = (state.prev_band_height, state.band_height) {
        if now > prev + EPS {
            flag(ViolationKind::BandHeightIncreased, now - prev);
        }
    }
    let separation = state.evader.distance(proj);
    if p.distance(state.evader) > k.r_capture
        && (guard_gap - k.d_guard).abs() <= INVARIANT_TOLERANCE
        && separation <= k.safe_margin - 1e-9
    {
        flag(ViolationKind::AliveStateInconsistent, separation);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{EvaderPolicy, PolicyKind};

    fn square(side: f64) -> ConvexPolygon {
        ConvexPolygon::rectangle(Point::ORIGIN, Point::new(side, side)).unwrap()
    }

    fn stationary() -> EvaderPolicy {
        EvaderPolicy::new(PolicyKind::Scripted(vec![]), 0)
    }

    #[test]
    fn new_game_examples() {
        let g = new_game(square(20.0), Pose::new(2.0, 2.0, 0.0), Point::new(15.0, 15.0), stationary(), 1.0, 1).unwrap();
        assert_eq!(g.phase, Phase::Approach);
        assert_eq!(g.step, 0);
        assert!((g.q.area() - 18.0 * 18.0).abs() < 1e-9);

        assert!(matches!(
            new_game(square(20.0), Pose::new(2.0, 2.0, 0.0), Point::new(3.0, 3.0), stationary(), 1.0, 1),
            Err(GameError::StartInCollision { .. })
        ));
        assert_eq!(
            new_game(square(1.5), Pose::new(0.7, 0.7, 0.0), Point::new(0.8, 0.8), stationary(), 1.0, 1).unwrap_err(),
            GameError::EmptyWorkspace
        );
        assert!(matches!(
            new_game(square(20.0), Pose::new(0.5, 2.0, 0.0), Point::new(15.0, 15.0), stationary(), 1.0, 1),
            Err(GameError::StartOutside { who: Actor::Pursuer })
        ));
    }

    #[test]
    fn evader_turn_examples() {
        let mut g = new_game(square(20.0), Pose::new(2.0, 2.0, 0.0), Point::new(10.0, 10.0), stationary(), 1.0, 1).unwrap();
        g.evader_turn(Point::new(10.6, 10.8)).unwrap();
        assert!(!g.is_captured());
        assert_eq!(g.step, 1);
        g.pursuer_turn().unwrap();

        let before = g.clone();
        assert!(matches!(g.evader_turn(Point::new(11.8, 10.8)), Err(GameError::IllegalMove(_))));
        assert_eq!(g.step, before.step);
        assert_eq!(g.evader, before.evader);

        // A path grazing the pursuer at distance 1.9 is a capture.
        let mut g = new_game(square(20.0), Pose::new(5.0, 5.0, 0.0), Point::new(4.6, 8.0), stationary(), 1.0, 1).unwrap();
        g.evader = Point::new(4.6, 6.9);
        g.evader_turn(Point::new(5.4, 6.9)).unwrap();
        assert!(g.is_captured());
        assert_eq!(g.stats.captured_by, Some(Actor::Evader));
    }

    #[test]
    fn step_bound_arithmetic() {
        let k = StrategyConstants::default();
        assert_eq!(step_bound_for_diameter(18.0 * 2f64.sqrt(), &k, 1.0), 742_586);
        assert_eq!(step_bound_for_diameter(5.0, &k, 1.0), 28_895);
        let unit = step_bound_for_diameter(5.0, &k, 1.0) - 5;
        assert_eq!(step_bound_for_diameter(5.0, &k, 0.5) - 5, 4 * unit);
        assert_eq!(theoretical_step_bound(&erode(&square(20.0), 1.0).unwrap(), &k, 1.0), 742_586);
    }

    #[test]
    fn stationary_evader_is_captured() {
        let mut g = new_game(square(20.0), Pose::new(2.0, 2.0, 0.3), Point::new(16.0, 5.0), stationary(), 1.0, 1).unwrap();
        let out = g.run_to_bound().unwrap();
        assert!(out.captured, "{out:?}");
        assert!(g.violations.is_empty(), "{:?}", g.violations);
        assert!(g.stats.zigzag_count > 0);
    }

    fn guarded_game() -> GameState {
        let mut g = new_game(square(20.0), Pose::new(2.0, 2.0, 0.3), Point::new(16.0, 5.0), stationary(), 1.0, 1).unwrap();
        while g.phase != Phase::Guarding {
            g.evader_turn(g.evader).unwrap();
            g.pursuer_turn().unwrap();
        }
        g
    }

    #[test]
    fn crossing_attempt_is_captured_next_turn() {
        let mut g = guarded_game();
        for _ in 0..100 {
            let guard = g.guard.unwrap();
            let toward = (guard.project(g.evader) - g.evader).normalized();
            g.evader_turn(g.evader + toward).unwrap();
            if g.is_captured() {
                return;
            }
            let breached = guard.height(g.evader) < g.constants.safe_margin;
            let case = g.pursuer_turn().unwrap();
            if breached {
                assert_eq!(case, DecisionCase::BreachCapture);
                assert!(g.is_captured());
                return;
            }
            assert!(!g.is_captured());
        }
        panic!("evader never reached the guard line");
    }

    #[test]
    fn monitors_flag_injected_faults() {
        let g = guarded_game();
        assert!(monitors(&g).is_empty());

        let mut bent = g.clone();
        bent.pursuer.theta += 0.01;
        let kinds: Vec<_> = monitors(&bent).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::Invariant1Violation]);

        let mut slid = g.clone();
        let u = g.guard.unwrap().forward();
        let p = slid.pursuer.position() + u * 0.3;
        slid.pursuer.x = p.x;
        slid.pursuer.y = p.y;
        let kinds: Vec<_> = monitors(&slid).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::Invariant2Violation));
    }

    #[test]
    fn out_of_turn_calls_are_rejected() {
        let mut g = new_game(square(20.0), Pose::new(2.0, 2.0, 0.0), Point::new(10.0, 10.0), stationary(), 1.0, 1).unwrap();
        assert_eq!(g.pursuer_turn(), Err(GameError::OutOfTurn(Actor::Pursuer)));
        assert!(matches!(plan_turn(&g, &g.constants.clone()), Err(StrategyError::NotPursuerTurn)));
        g.evader_turn(g.evader).unwrap();
        assert_eq!(g.evader_turn(g.evader), Err(GameError::OutOfTurn(Actor::Evader)));
    }
}
