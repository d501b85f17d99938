//! Plays one game and prints a per-phase summary.
//!
//! cargo run --example simulate_game -- threshold_dancer 4

use chordguard::engine::Actor;
use chordguard::io::{load_workspace, simulate, SimulationConfig};
use chordguard::strategy::DecisionCase;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let policy = args.next().unwrap_or_else(|| "greedy_runner".into());
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let ws = load_workspace(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("workspaces/square-20.json"))?;
    let config = SimulationConfig {
        workspace: ws.polygon,
        policy: policy.parse()?,
        seed,
        epsilon: 1.0,
        max_rounds: None,
        pursuer: None,
        evader: None,
    };
    let (game, outcome) = simulate(&config)?;
    println!("{policy} seed {seed}: captured={} after {} rounds", outcome.captured, outcome.rounds);
    println!("on chord after round {:?}, guarding from round {:?}", game.stats.on_chord_round, game.stats.guarding_round);
    for case in [
        DecisionCase::Approach,
        DecisionCase::Establishing,
        DecisionCase::ZigzagNegative,
        DecisionCase::ZigzagSmallPositive,
        DecisionCase::HorizontalFollow,
        DecisionCase::BreachCapture,
    ] {
        let n = game.event_log.iter().filter(|r| r.case == Some(case)).count();
        println!("{case:>22}: {n}");
    }
    let bands: Vec<f64> = game
        .event_log
        .iter()
        .filter(|r| r.actor == Actor::Pursuer)
        .filter_map(|r| r.band_height)
        .collect();
    if let (Some(first), Some(last)) = (bands.first(), bands.last()) {
        println!("band height {first:.3} -> {last:.3}");
    }
    println!("monitor violations: {}", game.violations.len());
    Ok(())
}
