//! The pursuer's guarding strategy.
//!
//! The pursuer first drives onto a longest chord of the arena and settles at
//! half a step from the evader's projection with its heading along the chord.
//! From then on every turn either punishes an evader that came too close to
//! the guarded chord, lifts the chord toward the evader with a zig-zag, or
//! follows the projection sideways.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Actor, GameState, Phase};
use crate::geometry::{chord_through, Chord, ConvexPolygon, GeometryError, Point, EPS};
use crate::motion::{apply, normalize_angle, MotionPrimitive, Pose, TurnPlan};
use crate::solver::{find_root_monotone, maximize_unimodal, second_derivative_at, SolverError};

/// Tolerance on the two guarding invariants.
pub const INVARIANT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("it is not the pursuer's turn")]
    NotPursuerTurn,
    #[error("the game is already over")]
    GameOver,
    #[error("pursuer is {measured} from the evader projection, expected {expected}")]
    InvariantViolated { measured: f64, expected: f64 },
    #[error("zig-zag budget {budget} does not cover the rotations for alpha = {alpha}")]
    NonPositiveBudget { budget: f64, alpha: f64 },
    #[error("no feasible plan: {0}")]
    InfeasiblePlan(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Numeric parameters of the strategy for one turn duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyConstants {
    /// Guaranteed lift of the guarded chord per zig-zag.
    pub k_v: f64,
    /// Shift threshold between zig-zagging and following.
    pub k_h: f64,
    pub alpha_star: f64,
    pub alpha_kh: f64,
    pub d_guard: f64,
    pub settle_threshold: f64,
    pub safe_margin: f64,
    pub r_capture: f64,
    pub turn_duration: f64,
}

impl Default for StrategyConstants {
    /// Reference values for unit turns.
    fn default() -> Self {
        Self {
            k_v: 0.0156,
            k_h: 0.056,
            alpha_star: 0.1251,
            alpha_kh: 0.2371,
            d_guard: 0.5,
            settle_threshold: 1.5,
            safe_margin: 15f64.sqrt() / 2.0,
            r_capture: 2.0,
            turn_duration: 1.0,
        }
    }
}

impl StrategyConstants {
    /// Constants for turns of length `epsilon` (in units of the unit turn).
    ///
    /// Unit turns use the reference values; other durations are derived
    /// numerically from the same progress objectives.
    pub fn for_turn_duration(epsilon: f64) -> Result<Self, StrategyError> {
        if epsilon == 1.0 {
            return Ok(Self::default());
        }
        let derived = derive_constants(epsilon)?;
        let r_capture = 2.0;
        let d_guard = epsilon / 2.0;
        Ok(Self {
            k_v: derived.k_v,
            k_h: derived.k_h,
            alpha_star: derived.alpha_star,
            alpha_kh: derived.alpha_kh,
            d_guard,
            settle_threshold: 1.5 * epsilon,
            safe_margin: (r_capture * r_capture - d_guard * d_guard).sqrt(),
            r_capture,
            turn_duration: epsilon,
        })
    }
}

/// Perpendicular lift of a zig-zag that rotates by `alpha` within `budget`
/// time units.
pub fn zigzag_progress(budget: f64, alpha: f64) -> f64 {
    (budget - 2.0 * alpha) * (alpha / 2.0).tan()
}

/// Closed-form derivative of [`zigzag_progress`] with respect to `alpha`.
pub fn zigzag_progress_slope(budget: f64, alpha: f64) -> f64 {
    let sec2 = 1.0 / (alpha / 2.0).cos().powi(2);
    (budget / 2.0 - alpha) * sec2 - 2.0 * (alpha / 2.0).tan()
}

/// Best rotation angle and resulting lift for a zig-zag with `budget`.
pub fn best_zigzag(budget: f64) -> Result<(f64, f64), StrategyError> {
    if budget <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let hi = FRAC_PI_2.min(budget / 2.0);
    let r = maximize_unimodal(|a| zigzag_progress(budget, a), 0.0, hi, 1e-10)?;
    Ok((r.argmax, r.max_value))
}

/// Numerically derived strategy constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub alpha_star: f64,
    pub k_v: f64,
    pub k_h: f64,
    pub alpha_kh: f64,
    pub second_derivative: f64,
    /// Closed-form first derivative evaluated at `alpha_star`; should vanish.
    pub slope_residual: f64,
}

/// Derives the zig-zag constants for turns of length `epsilon`.
///
/// `k_v` is the lift when half the turn is spent restoring the guard
/// distance; `k_h` is the shift at which zig-zagging and following make the
/// same progress.
pub fn derive_constants(epsilon: f64) -> Result<DerivedConstants, StrategyError> {
    let half = epsilon / 2.0;
    let worst = maximize_unimodal(|a| zigzag_progress(half, a), 0.0, FRAC_PI_2, 1e-10)?;
    let second_derivative = second_derivative_at(|a| zigzag_progress(half, a), worst.argmax, 1e-4);
    let slope_residual = zigzag_progress_slope(half, worst.argmax);

    let lift_minus_shift = |d: f64| -> f64 {
        maximize_unimodal(|a| zigzag_progress(epsilon - d, a), 0.0, FRAC_PI_2, 1e-10)
            .map(|r| r.max_value - d)
            .unwrap_or(f64::NAN)
    };
    let k_h = find_root_monotone(lift_minus_shift, 0.0, half, 1e-8)?;
    let alpha_kh = maximize_unimodal(|a| zigzag_progress(epsilon - k_h, a), 0.0, FRAC_PI_2, 1e-10)?.argmax;

    Ok(DerivedConstants {
        alpha_star: worst.argmax,
        k_v: worst.max_value,
        k_h,
        alpha_kh,
        second_derivative,
        slope_residual,
    })
}

/// The chord currently guarded and the side the evader is confined to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardLine {
    pub chord: Chord,
    /// Unit normal pointing into the evader's region.
    pub evader_normal: Point,
}

impl GuardLine {
    /// Guard `chord` against an evader standing at `evader`.
    pub fn facing(chord: Chord, evader: Point) -> Self {
        let n = chord.direction().perp();
        let evader_normal = if (evader - chord.a).dot(n) >= 0.0 { n } else { -n };
        Self { chord, evader_normal }
    }

    pub fn forward(&self) -> Point {
        self.chord.direction()
    }

    /// Signed distance from the chord line, positive on the evader side.
    pub fn height(&self, p: Point) -> f64 {
        (p - self.chord.a).dot(self.evader_normal)
    }

    pub fn project(&self, p: Point) -> Point {
        self.chord.segment().closest_point(p)
    }

    /// Extent of the arena on the evader side, measured along the normal.
    pub fn band_height(&self, q: &ConvexPolygon) -> f64 {
        q.vertices()
            .iter()
            .map(|&v| self.height(v))
            .fold(0.0, f64::max)
    }
}

/// Per-turn frame: origin at the evader's projection before its move, +x
/// pointing from the pursuer toward that origin, +y toward the evader.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub origin: Point,
    pub x_axis: Point,
    pub y_axis: Point,
}

impl LocalFrame {
    pub fn x_of(&self, p: Point) -> f64 {
        (p - self.origin).dot(self.x_axis)
    }

    pub fn at(&self, x: f64) -> Point {
        self.origin + self.x_axis * x
    }
}

pub fn local_frame(
    guard: &GuardLine,
    pursuer: &Pose,
    evader_before: Point,
    constants: &StrategyConstants,
) -> Result<LocalFrame, StrategyError> {
    let origin = guard.project(evader_before);
    let p = pursuer.position();
    let measured = p.distance(origin);
    if (measured - constants.d_guard).abs() > INVARIANT_TOLERANCE {
        return Err(StrategyError::InvariantViolated { measured, expected: constants.d_guard });
    }
    let u = guard.forward();
    let x_axis = if (origin - p).dot(u) >= 0.0 { u } else { -u };
    Ok(LocalFrame { origin, x_axis, y_axis: guard.evader_normal })
}

/// Signed displacement of the evader's new projection in the local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    Positive(f64),
    /// Includes a projection that stayed at the origin.
    Negative(f64),
}

impl Projection {
    pub fn shift(&self) -> f64 {
        match *self {
            Projection::Positive(s) | Projection::Negative(s) => s,
        }
    }
}

pub fn classify(frame: &LocalFrame, guard: &GuardLine, evader_after: Point) -> Projection {
    let shift = frame.x_of(guard.project(evader_after));
    if shift > 0.0 {
        Projection::Positive(shift)
    } else {
        Projection::Negative(shift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionCase {
    Approach,
    Establishing,
    BreachCapture,
    ZigzagNegative,
    ZigzagSmallPositive,
    HorizontalFollow,
}

impl DecisionCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecisionCase::Approach => "approach",
            DecisionCase::Establishing => "establishing",
            DecisionCase::BreachCapture => "breach-capture",
            DecisionCase::ZigzagNegative => "zigzag-negative",
            DecisionCase::ZigzagSmallPositive => "zigzag-small-positive",
            DecisionCase::HorizontalFollow => "horizontal-follow",
        }
    }

    pub fn is_zigzag(&self) -> bool {
        matches!(self, DecisionCase::ZigzagNegative | DecisionCase::ZigzagSmallPositive)
    }
}

impl fmt::Display for DecisionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnDecision {
    pub case: DecisionCase,
    pub plan: TurnPlan,
    /// Projection shift in the local frame, when guarding.
    pub shift: Option<f64>,
    pub predicted_vertical_progress: f64,
    pub alpha: f64,
    /// Replacement guard line; `None` keeps the current one.
    pub new_guard_line: Option<GuardLine>,
}

impl TurnDecision {
    fn simple(case: DecisionCase, plan: TurnPlan) -> Self {
        Self { case, plan, shift: None, predicted_vertical_progress: 0.0, alpha: 0.0, new_guard_line: None }
    }
}

/// Turn toward the closest point of `chord`, drive there, then align the
/// heading with the chord (forward or reverse), within `budget`.
pub fn approach_plan(chord: &Chord, pursuer: &Pose, budget: f64) -> TurnPlan {
    let mut plan = TurnPlan::empty();
    let mut left = budget;
    let mut theta = pursuer.theta;
    let p = pursuer.position();
    let target = chord.segment().closest_point(p);
    let gap = target - p;
    let dist = gap.norm();

    if dist > EPS {
        let desired = gap.y.atan2(gap.x);
        let fwd = normalize_angle(desired - theta);
        let rev = normalize_angle(desired + std::f64::consts::PI - theta);
        let (rot, sign) = if fwd.abs() <= rev.abs() { (fwd, 1.0) } else { (rev, -1.0) };
        let r = rot.clamp(-left, left);
        if r != 0.0 {
            plan.push(MotionPrimitive::Rotate(r));
            left -= r.abs();
            theta += r;
        }
        if r != rot {
            return plan;
        }
        let s = left.min(dist);
        plan.push(MotionPrimitive::Translate(sign * s));
        left -= s;
        if s < dist {
            return plan;
        }
    }

    let u = chord.direction();
    let mut align = normalize_angle(u.y.atan2(u.x) - theta);
    if align > FRAC_PI_2 {
        align -= std::f64::consts::PI;
    } else if align < -FRAC_PI_2 {
        align += std::f64::consts::PI;
    }
    let r = align.clamp(-left, left);
    if r != 0.0 {
        plan.push(MotionPrimitive::Rotate(r));
    }
    plan
}

/// One establishing move along `chord` toward the evader projection `target`.
///
/// Far away the pursuer takes a full step; otherwise it settles at the guard
/// distance on its own side of the projection (or the other side when its own
/// would leave the chord).
pub fn establishment_step(chord: &Chord, pursuer: &Pose, target: Point, constants: &StrategyConstants) -> TurnPlan {
    let sp = chord.param_of(pursuer.position());
    let se = chord.param_of(target);
    let gap = se - sp;
    let along = if pursuer.heading().dot(chord.direction()) >= 0.0 { 1.0 } else { -1.0 };

    let mv = if gap.abs() > constants.settle_threshold {
        gap.signum() * constants.turn_duration
    } else {
        let own_side = if gap > 0.0 { -1.0 } else if gap < 0.0 { 1.0 } else { -1.0 };
        let mut spot = se + own_side * constants.d_guard;
        if !chord.covers(spot, EPS) {
            spot = se - own_side * constants.d_guard;
        }
        spot - sp
    };
    if mv == 0.0 {
        TurnPlan::empty()
    } else {
        TurnPlan::new(vec![MotionPrimitive::Translate(along * mv)])
    }
}

/// Orientation of a zig-zag relative to the current heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift {
    /// Sign of the first rotation.
    pub rotation_sign: f64,
    /// Sign of the first translation (negative drives in reverse).
    pub leg_sign: f64,
}

impl Lift {
    /// Lift toward `normal`, with the diagonal leg drifting along `drift`.
    pub fn toward(heading: Point, normal: Point, drift: Point) -> Self {
        let leg_sign = if heading.dot(drift) >= 0.0 { 1.0 } else { -1.0 };
        let side = if heading.cross(normal) >= 0.0 { 1.0 } else { -1.0 };
        Self { rotation_sign: leg_sign * side, leg_sign }
    }
}

/// Length of the diagonal leg of a zig-zag.
pub fn zigzag_leg(budget: f64, alpha: f64) -> f64 {
    (budget - 2.0 * alpha) / (1.0 + alpha.cos())
}

/// Rotate, drive diagonally, rotate back, reverse out the sideways drift, then
/// `restore` along the heading. Consumes exactly `budget + |restore|`.
pub fn zigzag_plan(budget: f64, alpha: f64, restore: f64, lift: Lift) -> Result<TurnPlan, StrategyError> {
    if budget <= 2.0 * alpha {
        return Err(StrategyError::NonPositiveBudget { budget, alpha });
    }
    let leg = zigzag_leg(budget, alpha);
    let turn = lift.rotation_sign * alpha;
    Ok(TurnPlan::new(vec![
        MotionPrimitive::Rotate(turn),
        MotionPrimitive::Translate(lift.leg_sign * leg),
        MotionPrimitive::Rotate(-turn),
        MotionPrimitive::Translate(-lift.leg_sign * leg * alpha.cos()),
        MotionPrimitive::Translate(restore),
    ]))
}

/// Which zig-zag family a lower bound is requested for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProgressCase {
    /// Negative projection; argument is the pursuer's remaining distance to
    /// the new projection after the lift, in `[0, d_guard]`.
    Negative { gap: f64 },
    /// Positive projection below the threshold.
    SmallPositive { shift: f64 },
}

/// Best achievable lift for a zig-zag case.
pub fn vertical_progress_floor(case: ProgressCase, constants: &StrategyConstants) -> Result<f64, StrategyError> {
    let budget = match case {
        ProgressCase::Negative { gap } => constants.d_guard + gap,
        ProgressCase::SmallPositive { shift } => constants.turn_duration - shift,
    };
    Ok(best_zigzag(budget)?.1)
}

/// Plans the pursuer's reply to the evader's last move.
pub fn plan_turn(state: &GameState, constants: &StrategyConstants) -> Result<TurnDecision, StrategyError> {
    if state.phase == Phase::Captured {
        return Err(StrategyError::GameOver);
    }
    if state.to_move != Actor::Pursuer {
        return Err(StrategyError::NotPursuerTurn);
    }
    match state.phase {
        Phase::Approach => Ok(TurnDecision::simple(
            DecisionCase::Approach,
            approach_plan(&state.longest_chord, &state.pursuer, constants.turn_duration),
        )),
        Phase::Establishing => {
            let chord = state.longest_chord;
            let target = chord.segment().closest_point(state.evader);
            let plan = establishment_step(&chord, &state.pursuer, target, constants);
            let (end, _) = apply(state.pursuer, &plan);
            let mut decision = TurnDecision::simple(DecisionCase::Establishing, plan);
            if (end.position().distance(target) - constants.d_guard).abs() <= INVARIANT_TOLERANCE {
                decision.new_guard_line = Some(GuardLine::facing(chord, state.evader));
            }
            Ok(decision)
        }
        Phase::Guarding => {
            let guard = state
                .guard
                .ok_or_else(|| StrategyError::InfeasiblePlan("guarding without a guard line".into()))?;
            plan_guarding(&state.q, &guard, &state.pursuer, state.evader_turn_start, state.evader, constants)
        }
        Phase::Captured => unreachable!(),
    }
}

/// The guarding reply: breach capture, zig-zag, or horizontal follow.
pub fn plan_guarding(
    q: &ConvexPolygon,
    guard: &GuardLine,
    pursuer: &Pose,
    evader_before: Point,
    evader_after: Point,
    k: &StrategyConstants,
) -> Result<TurnDecision, StrategyError> {
    let frame = local_frame(guard, pursuer, evader_before, k)?;
    let p = pursuer.position();
    let heading = pursuer.heading();
    let new_proj = guard.project(evader_after);
    let clearance = guard.height(evader_after).min(evader_after.distance(new_proj));
    let projection = classify(&frame, guard, evader_after);
    let shift = projection.shift();
    let xp = frame.x_of(p);
    let chord = &guard.chord;
    let on_chord = |x: f64| chord.covers(chord.param_of(frame.at(x)), EPS);
    let translate_to = |x: f64| (frame.at(x) - p).dot(heading);

    if clearance < k.safe_margin {
        let own = if xp <= shift { -1.0 } else { 1.0 };
        let mut spot = shift + own * k.d_guard;
        if !on_chord(spot) {
            spot = shift - own * k.d_guard;
        }
        let s = translate_to(spot).clamp(-k.turn_duration, k.turn_duration);
        return Ok(TurnDecision {
            case: DecisionCase::BreachCapture,
            plan: TurnPlan::new(vec![MotionPrimitive::Translate(s)]),
            shift: Some(shift),
            predicted_vertical_progress: 0.0,
            alpha: 0.0,
            new_guard_line: None,
        });
    }

    // Invariant spots on either side of the new projection, nearer first;
    // ties keep the pursuer on its current side.
    let mut spots = [shift - k.d_guard, shift + k.d_guard];
    if (spots[1] - xp).abs() < (spots[0] - xp).abs() {
        spots.swap(0, 1);
    }

    let zigzag_case = match projection {
        Projection::Negative(_) => Some(DecisionCase::ZigzagNegative),
        Projection::Positive(s) if s < k.k_h => Some(DecisionCase::ZigzagSmallPositive),
        Projection::Positive(_) => None,
    };

    if let Some(case) = zigzag_case {
        for &spot in &spots {
            if let Some(decision) = try_zigzag(q, guard, &frame, pursuer, evader_after, spot, shift, case, k)? {
                return Ok(decision);
            }
        }
    }

    // Follow the projection along the current chord.
    let spot = spots
        .iter()
        .copied()
        .find(|&x| on_chord(x) && (x - xp).abs() <= k.turn_duration + EPS)
        .ok_or_else(|| StrategyError::InfeasiblePlan(format!("no reachable guard spot for shift {shift}")))?;
    Ok(TurnDecision {
        case: DecisionCase::HorizontalFollow,
        plan: TurnPlan::new(vec![MotionPrimitive::Translate(translate_to(spot))]),
        shift: Some(shift),
        predicted_vertical_progress: 0.0,
        alpha: 0.0,
        new_guard_line: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn try_zigzag(
    q: &ConvexPolygon,
    guard: &GuardLine,
    frame: &LocalFrame,
    pursuer: &Pose,
    evader_after: Point,
    spot: f64,
    shift: f64,
    case: DecisionCase,
    k: &StrategyConstants,
) -> Result<Option<TurnDecision>, StrategyError> {
    let p = pursuer.position();
    let heading = pursuer.heading();
    let restore_x = spot - frame.x_of(p);
    let budget = k.turn_duration - restore_x.abs();
    if budget <= 0.0 {
        return Ok(None);
    }
    let (alpha, lift_height) = best_zigzag(budget)?;
    if lift_height < k.k_v - INVARIANT_TOLERANCE {
        return Ok(None);
    }

    let drift = if restore_x != 0.0 {
        frame.x_axis * restore_x.signum()
    } else {
        frame.x_axis * if shift >= frame.x_of(p) { 1.0 } else { -1.0 }
    };
    let lift = Lift::toward(heading, guard.evader_normal, drift);
    let restore = restore_x * frame.x_axis.dot(heading).signum();
    let plan = zigzag_plan(budget, alpha, restore, lift)?;

    let (end, swept) = apply(*pursuer, &plan);
    if swept.iter().any(|s| !q.contains(s.a, EPS) || !q.contains(s.b, EPS)) {
        return Ok(None);
    }
    let Ok(chord) = chord_through(q, end.position(), guard.forward()) else {
        return Ok(None);
    };
    let new_guard = GuardLine { chord: orient_like(chord, &guard.chord), evader_normal: guard.evader_normal };
    let new_proj = new_guard.project(evader_after);
    if (end.position().distance(new_proj) - k.d_guard).abs() > INVARIANT_TOLERANCE {
        return Ok(None);
    }

    Ok(Some(TurnDecision {
        case,
        plan,
        shift: Some(shift),
        predicted_vertical_progress: lift_height,
        alpha,
        new_guard_line: Some(new_guard),
    }))
}

/// Keep the chord's `a -> b` direction identical to `like`.
fn orient_like(chord: Chord, like: &Chord) -> Chord {
    if chord.direction().dot(like.direction()) >= 0.0 {
        chord
    } else {
        Chord { a: chord.b, b: chord.a }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{execute, parallel_error, plan_time, SpeedLimits};

    fn k() -> StrategyConstants {
        StrategyConstants::default()
    }

    fn x_axis_guard(len: f64) -> GuardLine {
        GuardLine {
            chord: Chord::new(Point::new(-len, 0.0), Point::new(len, 0.0)).unwrap(),
            evader_normal: Point::new(0.0, 1.0),
        }
    }

    #[test]
    fn constants_are_consistent() {
        let c = k();
        assert!((c.safe_margin.powi(2) + c.d_guard.powi(2) - c.r_capture.powi(2)).abs() < 1e-12);
        let half = StrategyConstants::for_turn_duration(0.5).unwrap();
        assert!((half.safe_margin.powi(2) + half.d_guard.powi(2) - 4.0).abs() < 1e-12);
        assert!(half.k_v < c.k_v && half.k_h < c.k_h);
    }

    #[test]
    fn derived_constants_match_reference_values() {
        let d = derive_constants(1.0).unwrap();
        assert!((d.alpha_star - 0.1251).abs() < 1e-3);
        assert!((d.k_v - 0.0156).abs() < 5e-4);
        assert!((d.k_h - 0.056).abs() < 1e-3);
        assert!((d.alpha_kh - 0.2371).abs() < 1e-3);
        assert!((d.second_derivative + 1.9999).abs() < 0.05);
        assert!(d.slope_residual.abs() < 1e-3);
    }

    #[test]
    fn lift_grows_with_budget() {
        let mut prev = 0.0;
        for i in 0..50 {
            let b = 0.5 + 0.5 * i as f64 / 49.0;
            let (_, lift) = best_zigzag(b).unwrap();
            assert!(lift >= prev - 1e-12);
            prev = lift;
        }
    }

    #[test]
    fn local_frame_examples() {
        let g = x_axis_guard(10.0);
        let p = Pose::new(0.0, 0.0, 0.0);
        let f = local_frame(&g, &p, Point::new(0.5, 3.0), &k()).unwrap();
        assert_eq!(f.origin, Point::new(0.5, 0.0));
        assert_eq!(f.x_axis, Point::new(1.0, 0.0));
        let f = local_frame(&g, &p, Point::new(-0.5, 3.0), &k()).unwrap();
        assert_eq!(f.origin, Point::new(-0.5, 0.0));
        assert_eq!(f.x_axis, Point::new(-1.0, 0.0));
        assert!(matches!(
            local_frame(&g, &p, Point::new(2.0, 3.0), &k()),
            Err(StrategyError::InvariantViolated { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let g = x_axis_guard(10.0);
        let f = local_frame(&g, &Pose::new(0.0, 0.0, 0.0), Point::new(0.5, 3.0), &k()).unwrap();
        let Projection::Positive(s) = classify(&f, &g, Point::new(0.8, 3.0)) else { panic!() };
        assert!((s - 0.3).abs() < 1e-12);
        assert_eq!(classify(&f, &g, Point::new(0.5, 2.5)), Projection::Negative(0.0));
        let Projection::Negative(s) = classify(&f, &g, Point::new(-0.2, 3.0)) else { panic!() };
        assert!((s + 0.7).abs() < 1e-12);
    }

    #[test]
    fn establishment_examples() {
        let chord = Chord::new(Point::new(0.0, 0.0), Point::new(20.0, 0.0)).unwrap();
        let p = Pose::new(5.0, 0.0, 0.0);
        let plan = establishment_step(&chord, &p, Point::new(7.3, 0.0), &k());
        assert_eq!(plan.primitives, vec![MotionPrimitive::Translate(1.0)]);

        let plan = establishment_step(&chord, &p, Point::new(6.2, 0.0), &k());
        let (end, _) = apply(p, &plan);
        assert!((end.x - 5.7).abs() < 1e-12);

        // reverse heading still moves toward the projection
        let back = Pose::new(5.0, 0.0, std::f64::consts::PI);
        let (end, _) = apply(back, &establishment_step(&chord, &back, Point::new(3.8, 0.0), &k()));
        assert!((end.x - 4.3).abs() < 1e-12);

        assert!(establishment_step(&chord, &p, Point::new(5.5, 0.0), &k()).primitives.is_empty());

        // at the chord end the settle spot flips to the inner side
        let end_pose = Pose::new(0.0, 0.0, 0.0);
        let (end, _) = apply(end_pose, &establishment_step(&chord, &end_pose, Point::new(0.2, 0.0), &k()));
        assert!((end.x - 0.7).abs() < 1e-12);
    }

    #[test]
    fn zigzag_examples() {
        let lift = Lift { rotation_sign: 1.0, leg_sign: 1.0 };
        let limits = SpeedLimits::default();

        let (alpha, _) = best_zigzag(0.5).unwrap();
        let plan = zigzag_plan(0.5, alpha, 0.5, lift).unwrap();
        assert!((zigzag_leg(0.5, alpha) - 0.12539).abs() < 1e-4);
        assert!((plan_time(&plan, &limits) - 1.0).abs() < 1e-9);
        let mut no_restore = plan.clone();
        no_restore.primitives.pop();
        let (end, _) = execute(Pose::new(0.0, 0.0, 0.0), &no_restore, &limits, 1.0).unwrap();
        assert!(end.x.abs() < 1e-12);
        assert!((end.y - 0.01565).abs() < 1e-4);
        assert!(parallel_error(end.theta, Point::new(1.0, 0.0)) < 1e-12);

        let plan = zigzag_plan(0.944, 0.2371, 0.056, lift).unwrap();
        let mut lift_only = plan.clone();
        lift_only.primitives.pop();
        let (end, _) = apply(Pose::new(0.0, 0.0, 0.0), &lift_only);
        assert!((end.y - 0.056).abs() < 1e-3);
        assert!((plan_time(&plan, &limits) - 1.0).abs() < 1e-9);

        assert!(matches!(zigzag_plan(0.2, 0.15, 0.0, lift), Err(StrategyError::NonPositiveBudget { .. })));
    }

    #[test]
    fn lift_orientation_covers_all_headings() {
        for theta in [0.0, std::f64::consts::PI] {
            for normal in [Point::new(0.0, 1.0), Point::new(0.0, -1.0)] {
                for drift in [Point::new(1.0, 0.0), Point::new(-1.0, 0.0)] {
                    let pose = Pose::new(0.0, 0.0, theta);
                    let lift = Lift::toward(pose.heading(), normal, drift);
                    let plan = zigzag_plan(1.0, 0.25, 0.0, lift).unwrap();
                    let (mid, _) = apply(pose, &TurnPlan::new(plan.primitives[..2].to_vec()));
                    assert!(mid.position().dot(normal) > 0.0);
                    assert!(mid.position().dot(drift) > 0.0);
                    let (end, _) = apply(pose, &plan);
                    assert!(end.x.abs() < 1e-12 && end.position().dot(normal) > 0.06);
                }
            }
        }
    }

    #[test]
    fn progress_floor_examples() {
        let c = k();
        let neg = vertical_progress_floor(ProgressCase::Negative { gap: 0.0 }, &c).unwrap();
        assert!((neg - 0.0156).abs() < 5e-4);
        let pos = vertical_progress_floor(ProgressCase::SmallPositive { shift: 0.056 }, &c).unwrap();
        assert!((pos - 0.056).abs() < 1e-3);
        let zero = vertical_progress_floor(ProgressCase::SmallPositive { shift: 0.0 }, &c).unwrap();
        let oracle = (0..=100_000)
            .map(|i| zigzag_progress(1.0, 0.5 * i as f64 / 100_000.0))
            .fold(f64::MIN, f64::max);
        assert!((zero - oracle).abs() < 1e-8 && zero > 0.056);
    }

    fn guarding_setup(evader_x: f64) -> (ConvexPolygon, GuardLine, Pose, Point) {
        let q = ConvexPolygon::rectangle(Point::new(-20.0, 0.0), Point::new(20.0, 20.0)).unwrap();
        let guard = GuardLine {
            chord: Chord::new(Point::new(-20.0, 2.0), Point::new(20.0, 2.0)).unwrap(),
            evader_normal: Point::new(0.0, 1.0),
        };
        let pursuer = Pose::new(evader_x - 0.5, 2.0, 0.0);
        (q, guard, pursuer, Point::new(evader_x, 8.0))
    }

    #[test]
    fn breach_is_punished() {
        let (q, guard, pursuer, e) = guarding_setup(0.0);
        let after = Point::new(0.3, 3.5);
        let d = plan_guarding(&q, &guard, &pursuer, e, after, &k()).unwrap();
        assert_eq!(d.case, DecisionCase::BreachCapture);
        let (end, _) = apply(pursuer, &d.plan);
        let dist = end.position().distance(after);
        assert!((dist - (0.25f64 + 2.25).sqrt()).abs() < 1e-12 && dist < 2.0);
    }

    #[test]
    fn stationary_evader_gets_a_full_budget_zigzag() {
        let (q, guard, pursuer, e) = guarding_setup(0.0);
        let d = plan_guarding(&q, &guard, &pursuer, e, e, &k()).unwrap();
        assert_eq!(d.case, DecisionCase::ZigzagNegative);
        assert!(d.predicted_vertical_progress > 0.06);
    }

    #[test]
    fn worst_negative_shift_lifts_by_kv() {
        let (q, guard, pursuer, e) = guarding_setup(0.0);
        let after = Point::new(-0.5, 8.0);
        let d = plan_guarding(&q, &guard, &pursuer, e, after, &k()).unwrap();
        assert_eq!(d.case, DecisionCase::ZigzagNegative);
        assert!((d.predicted_vertical_progress - 0.0156).abs() < 5e-4);
        let (end, _) = apply(pursuer, &d.plan);
        assert!((end.y - 2.0 - d.predicted_vertical_progress).abs() < 1e-9);
        assert!((end.position().distance(Point::new(-0.5, end.y)) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn large_positive_shift_is_followed() {
        let (q, guard, pursuer, e) = guarding_setup(0.0);
        let d = plan_guarding(&q, &guard, &pursuer, e, Point::new(0.5, 8.0), &k()).unwrap();
        assert_eq!(d.case, DecisionCase::HorizontalFollow);
        assert_eq!(d.plan.primitives, vec![MotionPrimitive::Translate(0.5)]);
        assert!(d.new_guard_line.is_none());
    }

    #[test]
    fn small_positive_shift_zigzags() {
        let (q, guard, pursuer, e) = guarding_setup(0.0);
        let d = plan_guarding(&q, &guard, &pursuer, e, Point::new(0.03, 8.0), &k()).unwrap();
        assert_eq!(d.case, DecisionCase::ZigzagSmallPositive);
        assert!(d.predicted_vertical_progress > 0.056);
    }
}
