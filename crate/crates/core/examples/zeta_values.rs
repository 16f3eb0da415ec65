//! Point values of ζ and its derivatives, the functional equation, and the
//! Hardy decomposition at the first nontrivial zero.
//!
//! cargo run --release --example zeta_values

use num_complex::Complex64;
use std::f64::consts::PI;
use zeta_moments::zeta::{self, functional_factor, zeta_components, zeta_jet};

fn main() -> Result<(), zeta::ZetaError> {
    let c = |re: f64, im: f64| Complex64::new(re, im);

    println!("ζ(2)      = {:.15}  (π²/6 = {:.15})", zeta::zeta(c(2.0, 0.0))?.re, PI * PI / 6.0);
    println!("ζ(0)      = {:.15}", zeta::zeta(c(0.0, 0.0))?.re);
    println!("ζ'(0)     = {:.15}  (−ln(2π)/2 = {:.15})", zeta::zeta_derivative(c(0.0, 0.0), 1)?.re, -(2.0 * PI).ln() / 2.0);
    println!("ζ(−1)     = {:.15}", zeta::zeta(c(-1.0, 0.0))?.re);

    let rho1 = c(0.5, 14.134725141734693);
    println!("|ζ(ρ₁)|   = {:.3e}", zeta::zeta(rho1)?.norm());

    // value and two derivatives from one expansion
    let s = c(0.75, 100.0);
    let [z, d1, d2] = zeta_jet(s, 2)?;
    println!("\nat s = {s}:\n  ζ   = {z:.12}\n  ζ'  = {d1:.12}\n  ζ'' = {d2:.12}");

    // ζ(s) = χ(s) ζ(1−s)
    for s in [c(0.3, 7.0), c(-0.5, 40.0), c(1.8, 300.0)] {
        let lhs = zeta::zeta(s)?;
        let rhs = functional_factor(s) * zeta::zeta(Complex64::new(1.0, 0.0) - s)?;
        println!("functional equation at {s}: |residual| / |ζ| = {:.2e}", (lhs - rhs).norm() / lhs.norm());
    }

    let parts = zeta_components(0.5, 14.134725141734693)?;
    println!("\ncomponents at the first zero: {parts:?}");
    Ok(())
}
