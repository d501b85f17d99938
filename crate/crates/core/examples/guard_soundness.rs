//! Sweeps every evader move from one guarding configuration and reports how
//! the pursuer answers each.
//!
//! cargo run --example guard_soundness

use std::collections::BTreeMap;
use std::f64::consts::PI;

use chordguard::geometry::{chord_through, ConvexPolygon, Point};
use chordguard::motion::{execute, Pose, SpeedLimits};
use chordguard::strategy::{plan_guarding, GuardLine, StrategyConstants};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = StrategyConstants::default();
    let q = ConvexPolygon::rectangle(Point::new(1.0, 1.0), Point::new(19.0, 19.0))?;
    let chord = chord_through(&q, Point::new(10.0, 9.0), Point::new(1.0, 1.0))?;
    let proj = chord.point_at(chord.param_of(Point::new(9.0, 11.0)));
    let evader = proj + chord.direction().perp() * (k.safe_margin + 0.3);
    let guard = GuardLine::facing(chord, evader);
    let p = proj - chord.direction() * k.d_guard;
    let pursuer = Pose::new(p.x, p.y, PI / 4.0);

    let mut tally: BTreeMap<String, (u32, u32)> = BTreeMap::new();
    for i in 1..=50 {
        for j in 0..72 {
            let target = evader + Point::from_angle(2.0 * PI * j as f64 / 72.0) * (i as f64 / 50.0);
            if !q.contains(target, 1e-9) {
                continue;
            }
            let d = plan_guarding(&q, &guard, &pursuer, evader, target, &k)?;
            let (end, swept) = execute(pursuer, &d.plan, &SpeedLimits::default(), 1.0)?;
            let closest = swept.iter().map(|s| s.distance_to(target)).fold(end.position().distance(target), f64::min);
            let entry = tally.entry(d.case.to_string()).or_default();
            entry.0 += 1;
            entry.1 += u32::from(closest <= k.r_capture);
        }
    }
    println!("{:>22} {:>7} {:>9}", "reply", "moves", "captures");
    for (case, (n, caught)) in tally {
        println!("{case:>22} {n:>7} {caught:>9}");
    }
    Ok(())
}
