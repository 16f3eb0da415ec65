//! Discriminating the midpoint value Z(3/2, n) = π(2n−1) from the
//! aberrant candidate 2πn at integer r.
//!
//! cargo run --release --example aberrant_identity

use std::f64::consts::PI;
use zeta_moments::cesaro::accumulate_elements;
use zeta_moments::oracles::{identity_rhs, IdentityId};
use zeta_moments::quadrature::{unit_elements, Domain, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [1.0, 2.0, 3.0] {
        let spec = IntegrandSpec::new(Kernel::MomentOverS, 1.5, n).with_domain(Domain::Symmetric);
        let est = accumulate_elements(&unit_elements(&spec, 0.0, 2000.0, DEFAULT_PANEL_TOL)?, 1)?.final_mean();
        let midpoint = identity_rhs(IdentityId::Zdef, 1.5, n)?.finite_value().unwrap();
        let aberrant = identity_rhs(IdentityId::Case123, 1.5, n)?.finite_value().unwrap();
        println!(
            "r = {n}: estimate {est:.4}  |est − π(2n−1)| = {:.4}  |est − 2πn| = {:.4}  → {}",
            (est - midpoint).abs(),
            (est - aberrant).abs(),
            if (est - midpoint).abs() < (est - aberrant).abs() / 3.0 { "midpoint" } else { "undecided" }
        );
    }
    println!("(steps are 2π = {:.4})", 2.0 * PI);
    Ok(())
}
