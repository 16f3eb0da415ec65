//! The two lemma integrals ∫ t sin(at)/(σ²+t²) and ∫ cos(at)/(σ²+t²),
//! truncated at ±T and Cesàro-averaged, against their closed forms.
//!
//! cargo run --release --example lemma_integrals

use std::f64::consts::LN_2;
use zeta_moments::cesaro::accumulate_elements;
use zeta_moments::oracles::{lemma_oracle, LemmaKind};
use zeta_moments::quadrature::{unit_elements, Domain, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = 1.5;
    for (name, kernel, kind) in [
        ("t sin(at)/(σ²+t²)", Kernel::SinKernel { a: LN_2 }, LemmaKind::SinKernel),
        ("cos(at)/(σ²+t²)  ", Kernel::CosKernel { a: LN_2 }, LemmaKind::CosKernel),
    ] {
        let spec = IntegrandSpec::new(kernel, sigma, 1.0).with_domain(Domain::Symmetric);
        let exact = lemma_oracle(kind, LN_2, sigma)?;
        for t_max in [100.0, 400.0, 1600.0] {
            let trace = accumulate_elements(&unit_elements(&spec, 0.0, t_max, DEFAULT_PANEL_TOL)?, 1)?;
            println!(
                "{name} T={t_max:5}: partial {:+.6}  cesaro {:+.6}  exact {:+.6}  rel {:.2e}",
                trace.final_partial(),
                trace.final_mean(),
                exact,
                (trace.final_mean() - exact).abs() / exact
            );
        }
    }
    Ok(())
}
