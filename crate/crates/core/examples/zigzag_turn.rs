//! Plans one zig-zag reply and prints its primitives and the lifted guard line.
//!
//! cargo run --example zigzag_turn

use chordguard::geometry::{chord_through, ConvexPolygon, Point};
use chordguard::motion::{execute, plan_time, Pose, SpeedLimits};
use chordguard::strategy::{plan_guarding, GuardLine, StrategyConstants};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = StrategyConstants::default();
    let q = ConvexPolygon::rectangle(Point::new(0.0, 0.0), Point::new(20.0, 20.0))?;
    let chord = chord_through(&q, Point::new(10.0, 8.0), Point::new(1.0, 0.0))?;
    let evader = Point::new(10.5, 11.0);
    let guard = GuardLine::facing(chord, evader);
    let pursuer = Pose::new(10.0, 8.0, 0.0);

    for (label, target) in [("backward", Point::new(10.1, 11.3)), ("small forward", Point::new(10.53, 11.2))] {
        let d = plan_guarding(&q, &guard, &pursuer, evader, target, &k)?;
        let (end, _) = execute(pursuer, &d.plan, &SpeedLimits::default(), 1.0)?;
        println!("{label}: case {} shift {:.3} alpha {:.4}", d.case, d.shift.unwrap_or(0.0), d.alpha);
        for p in &d.plan.primitives {
            println!("    {p:?}");
        }
        let lifted = d.new_guard_line.expect("zig-zags move the guard line");
        println!(
            "    time {:.9}, lift {:.5}, end ({:.4}, {:.4}, {:.4}), guard distance {:.6}",
            plan_time(&d.plan, &SpeedLimits::default()),
            guard.height(lifted.chord.a),
            end.x,
            end.y,
            end.theta,
            end.position().distance(lifted.project(target)),
        );
    }
    Ok(())
}
