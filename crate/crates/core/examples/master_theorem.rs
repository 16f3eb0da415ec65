//! The pairing F(t) + F(−i−t) = 0 that underlies the master theorem, and
//! the Cesàro value of ∫F dt = −2πr.
//!
//! cargo run --release --example master_theorem

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use zeta_moments::cesaro::accumulate_elements;
use zeta_moments::quadrature::{master_f, unit_elements, Domain, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let i = Complex64::i();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = rng.gen_range(0.3..4.0);
        let t = Complex64::new(rng.gen_range(-200.0..200.0), 0.0);
        worst = worst.max((master_f(t, r)? + master_f(-i - t, r)?).norm());
    }
    println!("max |F(t) + F(−i−t)| over 100 random (t, r): {worst:.2e}");

    for r in [0.7, 1.3, 2.5] {
        let spec = IntegrandSpec::new(Kernel::MasterF, 0.5, r).with_domain(Domain::Symmetric);
        let trace = accumulate_elements(&unit_elements(&spec, 0.0, 1000.0, DEFAULT_PANEL_TOL)?, 1)?;
        println!("r = {r}: ∫F ≈ {:+.5}  (−2πr = {:+.5})", trace.final_mean(), -2.0 * PI * r);
    }
    Ok(())
}
