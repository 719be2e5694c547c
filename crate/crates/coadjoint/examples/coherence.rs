//! Coherent continuation: the su2 and sl2R families pass the exponential-fit test, corrupted controls fail it.
//!
//! cargo run --example coherence

use coadjoint::cli::{preset, run};

fn main() {
    for name in ["su2-coherence", "sl2r-coherence"] {
        let report = run(&preset(name).unwrap()).unwrap();
        println!("{name}: {:?}", report.verdict);
        for c in &report.checks {
            println!("  {:<40} {:>10.3e}  {}", c.name, c.value, if c.passed { "ok" } else { "FAILED" });
        }
    }
}
