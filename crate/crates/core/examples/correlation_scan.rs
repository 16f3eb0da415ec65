//! Shifted-segment autocorrelation of |ζ(σ+it)| over [L1, L1+126] as a
//! function of the shift ρ, from a warmed sample cache.
//!
//! cargo run --release --example correlation_scan

use zeta_moments::correlation::{ShiftedCorrelation, SignalComponent};
use zeta_moments::harness::CacheGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for sigma in [0.5, 0.75] {
        let grid = CacheGrid::compute(sigma, 0.0, 0.05, 7601)?;
        let setup = ShiftedCorrelation::new(sigma, SignalComponent::Abs).with_cache(&grid)?;
        for l1 in [0.0, 126.0] {
            let scan = setup.scan(l1, 126.0, 100.0, 150.0, 0.1)?;
            println!("σ = {sigma}, L1 = {l1}:");
            for p in &scan.local_maxima {
                if p.cor > 0.3 {
                    let tag = if scan.peaks.contains(p) { "  moderate" } else { "" };
                    println!("    ρ = {:8.3}  cor = {:.4}{tag}", p.rho, p.cor);
                }
            }
        }
    }
    Ok(())
}
