//! At integer r the moment integrals stop converging: the Cesàro mean
//! grows like T/2. Non-integer neighbours settle.
//!
//! cargo run --release --example dirac_tine

use zeta_moments::cesaro::{accumulate_elements, classify_growth};
use zeta_moments::quadrature::{unit_elements, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (sigma, r, t_max) in [(4.0, 4.0, 1000.0), (4.0, 4.5, 1000.0), (0.5, 1.0, 1000.0), (0.5, 2.0, 1000.0), (0.5, 2.5, 1000.0)] {
        let spec = IntegrandSpec::new(Kernel::PlainMoment { m: 0 }, sigma, r);
        let trace = accumulate_elements(&unit_elements(&spec, 0.0, t_max, DEFAULT_PANEL_TOL)?, 1)?;
        let c = classify_growth(&trace)?;
        println!(
            "σ = {sigma}, r = {r}: final mean {:+10.4}, slope {:+.4}, {:?}",
            trace.final_mean(),
            c.slope,
            c.verdict
        );
    }
    Ok(())
}
