//! Derives the zig-zag constants for a few turn durations.
//!
//! cargo run --example derive_constants

use chordguard::io::cmd_constants;
use chordguard::strategy::derive_constants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", cmd_constants()?);
    println!();
    println!("{:>8} {:>10} {:>10} {:>10}", "epsilon", "alpha*", "k_v", "k_h");
    for eps in [1.0, 0.75, 0.5, 0.25] {
        let d = derive_constants(eps)?;
        println!("{eps:>8} {:>10.5} {:>10.6} {:>10.6}", d.alpha_star, d.k_v, d.k_h);
    }
    Ok(())
}
