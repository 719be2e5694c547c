//! su3 with a u(2) stabilizer: a CP² × sphere contour of real dimension 6, integrated by Monte Carlo.
//!
//! cargo run --release --example su3_levi -- 200000

use coadjoint::cli::{preset, run, Overrides};

fn main() {
    let samples: usize = std::env::args().nth(1).map(|s| s.parse().expect("a sample count")).unwrap_or(100_000);
    let mut config = preset("su3-levi").unwrap();
    config.apply(&Overrides { mc_samples: Some(samples), ..Default::default() });
    let report = run(&config).unwrap();
    print!("{}", report.table());
}
