//! Crossings of the asymptote, their period in units of ρ = 2π/ln r, and
//! the closest approaches of the Cesàro estimate for σ = 1/2, r = 2.1.
//!
//! cargo run --release --example periodicity

use std::f64::consts::PI;
use zeta_moments::cesaro::accumulate_elements;
use zeta_moments::harness::periodicity_report;
use zeta_moments::quadrature::{unit_elements, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 2.1;
    let spec = IntegrandSpec::new(Kernel::PlainMoment { m: 0 }, 0.5, r);
    let trace = accumulate_elements(&unit_elements(&spec, 0.0, 2000.0, DEFAULT_PANEL_TOL)?, 1)?;
    let report = periodicity_report(&trace, -PI * r, r);
    print!("{report}");
    if let Ok(p) = &report.period {
        let ratios: Vec<String> = p.ratios.iter().map(|x| format!("{x:.3}")).collect();
        println!("crossing ratios (T_k − T_0)/period: {}", ratios.join(" "));
    }
    Ok(())
}
