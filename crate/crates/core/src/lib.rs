//! Pursuit-evasion in convex arenas: a differential drive pursuer guards a
//! chord of the arena and pushes it toward an equally fast evader until
//! capture.

pub mod cli;
pub mod engine;
pub mod geometry;
pub mod io;
pub mod motion;
pub mod policy;
pub mod service;
pub mod solver;
pub mod strategy;
pub mod trace;

pub use engine::{new_game, theoretical_step_bound, Actor, GameError, GameState, Phase, RunOutcome};
pub use geometry::{erode, longest_chord, Chord, ConvexPolygon, GeometryError, Point, Segment};
pub use motion::{MotionPrimitive, Pose, SpeedLimits, TurnPlan};
pub use policy::{EvaderPolicy, PolicyKind};
pub use strategy::{plan_turn, DecisionCase, GuardLine, StrategyConstants};
pub use trace::TraceRecord;
