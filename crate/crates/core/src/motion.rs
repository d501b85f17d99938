//! Differential drive kinematics.
//!
//! The pursuer executes rotations in place and straight translations
//! separately, each at the boundary of the speed envelope
//! `|omega| <= (v_max - |v|) / R`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Segment};

/// Slack allowed on the per-turn time budget.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MotionError {
    #[error("plan needs {needed} time units, the turn allows {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error("command (v = {v}, omega = {omega}) is outside the speed envelope")]
    EnvelopeViolation { v: f64, omega: f64 },
}

/// Normalizes an angle to `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Smallest absolute difference between two directions, modulo pi.
pub fn parallel_error(theta: f64, direction: Point) -> f64 {
    let d = normalize_angle(theta - direction.y.atan2(direction.x));
    d.abs().min(PI - d.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta: normalize_angle(theta) }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn heading(&self) -> Point {
        Point::from_angle(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedLimits {
    pub v_max: f64,
    pub wheel_radius: f64,
    /// Distance from the robot center to each wheel.
    pub axle_half_length: f64,
}

impl Default for SpeedLimits {
    fn default() -> Self {
        Self { v_max: 1.0, wheel_radius: 1.0, axle_half_length: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionPrimitive {
    /// Signed rotation in place, radians.
    Rotate(f64),
    /// Signed straight translation along the heading; negative drives in reverse.
    Translate(f64),
}

impl MotionPrimitive {
    pub fn time_cost(&self, limits: &SpeedLimits) -> f64 {
        match *self {
            MotionPrimitive::Rotate(dtheta) => dtheta.abs() * limits.axle_half_length / limits.v_max,
            MotionPrimitive::Translate(s) => s.abs() / limits.v_max,
        }
    }

    /// The `(v, omega)` command the primitive runs at.
    pub fn operating_point(&self, limits: &SpeedLimits) -> (f64, f64) {
        match *self {
            MotionPrimitive::Rotate(dtheta) => (0.0, dtheta.signum() * limits.v_max / limits.axle_half_length),
            MotionPrimitive::Translate(s) => (s.signum() * limits.v_max, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TurnPlan {
    pub primitives: Vec<MotionPrimitive>,
}

impl TurnPlan {
    pub fn new(primitives: Vec<MotionPrimitive>) -> Self {
        Self { primitives }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn push(&mut self, p: MotionPrimitive) {
        self.primitives.push(p);
    }

    /// The plan that undoes this one.
    pub fn reversed(&self) -> TurnPlan {
        TurnPlan::new(
            self.primitives
                .iter()
                .rev()
                .map(|p| match *p {
                    MotionPrimitive::Rotate(a) => MotionPrimitive::Rotate(-a),
                    MotionPrimitive::Translate(s) => MotionPrimitive::Translate(-s),
                })
                .collect(),
        )
    }

    /// Net signed translation, ignoring rotations.
    pub fn total_translation(&self) -> f64 {
        self.primitives
            .iter()
            .map(|p| match *p {
                MotionPrimitive::Translate(s) => s,
                MotionPrimitive::Rotate(_) => 0.0,
            })
            .sum()
    }
}

pub fn plan_time(plan: &TurnPlan, limits: &SpeedLimits) -> f64 {
    plan.primitives.iter().map(|p| p.time_cost(limits)).sum()
}

/// Applies `plan` to `pose`, returning the final pose and each non-empty
/// translation as a swept segment.
pub fn execute(
    pose: Pose,
    plan: &TurnPlan,
    limits: &SpeedLimits,
    turn_duration: f64,
) -> Result<(Pose, Vec<Segment>), MotionError> {
    let needed = plan_time(plan, limits);
    if needed > turn_duration + BUDGET_TOLERANCE {
        return Err(MotionError::BudgetExceeded { needed, budget: turn_duration });
    }
    Ok(apply(pose, plan))
}

/// Applies `plan` without budget accounting.
pub fn apply(pose: Pose, plan: &TurnPlan) -> (Pose, Vec<Segment>) {
    let mut x = pose.x;
    let mut y = pose.y;
    let mut theta = pose.theta;
    let mut swept = Vec::new();
    for p in &plan.primitives {
        match *p {
            MotionPrimitive::Rotate(dtheta) => theta = normalize_angle(theta + dtheta),
            MotionPrimitive::Translate(s) => {
                if s == 0.0 {
                    continue;
                }
                let start = Point::new(x, y);
                x += s * theta.cos();
                y += s * theta.sin();
                swept.push(Segment::new(start, Point::new(x, y)));
            }
        }
    }
    (Pose { x, y, theta }, swept)
}

/// Wheel angular velocities `(omega_1, omega_2)` for a body command.
pub fn wheel_speeds(v: f64, omega: f64, limits: &SpeedLimits) -> Result<(f64, f64), MotionError> {
    let bound = (limits.v_max - v.abs()) / limits.axle_half_length;
    if v.abs() > limits.v_max + BUDGET_TOLERANCE || omega.abs() > bound + BUDGET_TOLERANCE {
        return Err(MotionError::EnvelopeViolation { v, omega });
    }
    let r = limits.wheel_radius;
    let big_r = limits.axle_half_length;
    Ok(((v - big_r * omega) / r, (v + big_r * omega) / r))
}

/// Body command `(v, omega)` produced by wheel angular velocities.
pub fn body_velocity(omega_1: f64, omega_2: f64, limits: &SpeedLimits) -> (f64, f64) {
    let r = limits.wheel_radius;
    (r * (omega_1 + omega_2) / 2.0, r * (omega_2 - omega_1) / (2.0 * limits.axle_half_length))
}
