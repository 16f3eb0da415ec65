//! Run experiments from the built-in suite (or a config file) and print the
//! summary table.
//!
//! cargo run --release --example verify_suite [-- suite.conf]

use zeta_moments::harness::{load_config, suite::acceptance_suite, verify_all};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => acceptance_suite()
            .into_iter()
            .filter(|c| c.t_max <= 1000.0 || c.experiment_id.starts_with("staircase"))
            .collect(),
    };
    let table = verify_all(&suite);
    println!("{table}");
    Ok(())
}
