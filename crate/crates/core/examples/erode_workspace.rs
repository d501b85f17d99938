//! Erodes a workspace file by the player radius and reports its longest chord.
//!
//! cargo run --example erode_workspace -- crates/core/workspaces/heptagon.json

use std::path::PathBuf;

use chordguard::geometry::{erode, longest_chord};
use chordguard::io::{load_workspace, serialize_workspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("workspaces/skewed-quad.json"));
    let ws = load_workspace(&path)?;
    let q = erode(&ws.polygon, 1.0)?;
    let l = longest_chord(&q);
    println!("workspace {}: area {:.3}, {} vertices", ws.name, ws.polygon.area(), ws.polygon.len());
    println!("playing space: area {:.3}, {} vertices", q.area(), q.len());
    println!("longest chord {} -> {} (length {:.4})", l.a, l.b, l.length());
    println!("{}", serialize_workspace(&q, Some(&format!("{}-eroded", ws.name))));
    Ok(())
}
