//! Warm a ζ sample cache, reload it, and show the interpolation error.
//!
//! cargo run --release --example cache_warm [-- path]

use num_complex::Complex64;
use std::time::Instant;
use zeta_moments::harness::{cache_warm, CacheGrid};
use zeta_moments::zeta;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("zeta-0.5.cache"));
    for _ in 0..2 {
        let start = Instant::now();
        let (grid, origin) = cache_warm(0.5, 0.0, 0.05, 7601, &path)?;
        println!("{origin:?} {} samples in {:?}", grid.count, start.elapsed());
    }
    let grid = CacheGrid::load(&path)?;
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let t = 10.0 + 0.3691 * k as f64;
        let exact = zeta::zeta(Complex64::new(0.5, t))?;
        worst = worst.max((grid.interpolate(t).unwrap() - exact).norm());
    }
    println!("max interpolation error on [10, 379]: {worst:.2e}");
    println!("cache at {}", path.display());
    Ok(())
}
