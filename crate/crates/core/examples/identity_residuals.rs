//! Residual experiments: LHS − RHS of the derivative identities, both
//! sides Cesàro-evaluated, should hover near zero.
//!
//! cargo run --release --example identity_residuals

use zeta_moments::harness::{run_experiment, suite::builtin, TrendCheck};
use zeta_moments::oracles::PredictionKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for id in ["jd1", "jdn", "jdn2", "jday", "rneqn2d", "reqn2d"] {
        let cfg = builtin(id).expect("built-in experiment");
        let out = run_experiment(&cfg)?;
        let PredictionKind::Finite(rhs) = out.prediction.kind else { unreachable!() };
        let trend = TrendCheck::of(&out.trace, rhs);
        println!(
            "{id:8} σ={:<6.3} r={:<4}  LHS {:+.5}  RHS {:+.5}  residual {:+.5}  envelope {:.3} → {:.3}  {}",
            cfg.integrand.sigma,
            cfg.integrand.r,
            out.measured,
            rhs,
            out.measured - rhs,
            trend.third_quarter_max,
            trend.last_eighth_max,
            out.verdict
        );
    }
    Ok(())
}
