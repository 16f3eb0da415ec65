//! Slow convergence of ∫_0^T Re ζ(σ+it) r^{σ+it} dt to −πr inside the
//! critical strip, and the σ-independence of the result.
//!
//! cargo run --release --example sighalf_convergence [-- out.csv]

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use zeta_moments::cesaro::{accumulate_elements, classify_growth_against};
use zeta_moments::harness::write_trace_csv;
use zeta_moments::quadrature::{unit_elements, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 2.1;
    let target = -PI * r;
    for sigma in [1.0 / 3.0, 0.5, 0.75, 0.875] {
        let spec = IntegrandSpec::new(Kernel::PlainMoment { m: 0 }, sigma, r);
        let trace = accumulate_elements(&unit_elements(&spec, 0.0, 2000.0, DEFAULT_PANEL_TOL)?, 1)?;
        let class = classify_growth_against(&trace, Some(target))?;
        let n = trace.len();
        println!(
            "σ = {sigma:.3}: mean at T=500 {:+.4}, 1000 {:+.4}, 2000 {:+.4} (−πr = {target:+.4}); {:?}",
            trace.means[n / 4 - 1],
            trace.means[n / 2 - 1],
            trace.final_mean(),
            class.verdict
        );
        if sigma == 0.5 {
            if let Some(path) = std::env::args().nth(1) {
                write_trace_csv(&trace, BufWriter::new(File::create(&path)?))?;
                println!("  trace written to {path}");
            }
        }
    }
    Ok(())
}
