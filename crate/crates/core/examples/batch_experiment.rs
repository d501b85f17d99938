//! Runs every preset workspace against every automatic policy and prints CSV.
//!
//! cargo run --release --example batch_experiment

use std::path::PathBuf;

use chordguard::io::{run_batch, write_batch_csv, BatchRow, BatchSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("workspaces");
    let mut rows = Vec::new();
    for ws in ["square-20", "skewed-quad", "heptagon"] {
        for policy in ["random", "greedy_runner", "threshold_dancer", "corner_hugger", "projection_pusher"] {
            rows.push(BatchRow { workspace: format!("{ws}.json").into(), policy: policy.into(), seeds: [1, 5], epsilon: 1.0 });
        }
    }
    let records = run_batch(&BatchSpec { rows, output: None }, &dir)?;
    write_batch_csv(std::io::stdout().lock(), &records)?;
    let captured = records.iter().filter(|r| r.captured).count();
    eprintln!("{captured}/{} captured", records.len());
    Ok(())
}
