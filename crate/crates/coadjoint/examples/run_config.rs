//! Running an experiment from a JSON config, the same way the binary does.
//!
//! cargo run --example run_config

use coadjoint::cli::{run, ExperimentConfig, Overrides};

const CONFIG: &str = r#"{
    "schema_version": 1,
    "kind": "rossmann_tempered",
    "group": "sl2R",
    "cartan": "compact",
    "lambda": { "simple_pairings": ["2"] },
    "densities": { "count": 4, "seed": 9 },
    "tolerance": 1e-3
}"#;

fn main() {
    let mut config = ExperimentConfig::from_json(CONFIG).expect("valid config");
    config.apply(&Overrides { seed: Some(11), ..Default::default() });
    config.validate().unwrap();
    println!("config hash {}", config.hash());
    let report = run(&config).unwrap();
    print!("{}", report.table());
    println!("exit code would be {}", report.verdict.exit_code());
}
