//! The staircase Z(3/2, r) = ∫ ζ(s) r^s/s dt: steps of 2π at each integer,
//! with the midpoint value π(2n−1) exactly on the integers.
//!
//! cargo run --release --example staircase [-- T]

use zeta_moments::cesaro::accumulate_elements;
use zeta_moments::oracles::z_oracle;
use zeta_moments::quadrature::{unit_elements, Domain, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t_max: f64 = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(1000.0);
    let sigma = 1.5;
    println!("{:>5}  {:>10}  {:>10}  {:>9}", "r", "cesaro", "oracle", "diff");
    for k in 1..=14 {
        let r = 0.25 * k as f64;
        let spec = IntegrandSpec::new(Kernel::MomentOverS, sigma, r).with_domain(Domain::Symmetric);
        let trace = accumulate_elements(&unit_elements(&spec, 0.0, t_max, DEFAULT_PANEL_TOL)?, 1)?;
        let oracle = z_oracle(sigma, r)?.finite_value().expect("σ > 1 is finite");
        println!("{r:5.2}  {:10.5}  {oracle:10.5}  {:+9.5}", trace.final_mean(), trace.final_mean() - oracle);
    }
    Ok(())
}
