//! The built-in verification suite: every trace-based claim with a closed
//! form, at desk scale (T ≤ 2000).

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use super::config::{AsymptoteSource, ExperimentConfig, OracleRef, Tolerance};
use crate::oracles::{IdentityId, LemmaKind};
use crate::quadrature::{Domain, IntegrandSpec, Kernel};

fn full(kernel: Kernel, sigma: f64, r: f64) -> IntegrandSpec {
    IntegrandSpec::new(kernel, sigma, r).with_domain(Domain::Symmetric)
}

fn half(kernel: Kernel, sigma: f64, r: f64) -> IntegrandSpec {
    IntegrandSpec::new(kernel, sigma, r)
}

fn residual() -> Kernel {
    Kernel::difference(Kernel::DerivativeOverS, Kernel::InverseSquare)
}

/// Lemma integrals, staircase, continuation values, (sighalf) convergence,
/// integer divergence, identity residuals, the master pairing and the
/// exploratory (Zr) run.
pub fn acceptance_suite() -> Vec<ExperimentConfig> {
    use IdentityId as Id;
    let mut suite = vec![
        ExperimentConfig::new("lemma-sin", full(Kernel::SinKernel { a: LN_2 }, 1.5, 1.0), 400.0)
            .oracle(OracleRef::Lemma(LemmaKind::SinKernel))
            .tolerance(Tolerance::Relative(0.01)),
        ExperimentConfig::new("lemma-cos", full(Kernel::CosKernel { a: LN_2 }, 1.5, 1.0), 400.0)
            .oracle(OracleRef::Lemma(LemmaKind::CosKernel))
            .tolerance(Tolerance::Relative(0.01)),
        // 2π⌊0.5⌋ = 0: a relative tolerance is meaningless, use 1% of one step
        ExperimentConfig::new("staircase-r0.5", full(Kernel::MomentOverS, 1.5, 0.5), 2000.0)
            .identity(Id::Zdef)
            .tolerance(Tolerance::Absolute(0.02 * PI)),
    ];
    for r in [1.5, 2.5, 3.3, 1.0, 2.0, 3.0] {
        suite.push(
            ExperimentConfig::new(format!("staircase-r{r}"), full(Kernel::MomentOverS, 1.5, r), 2000.0)
                .identity(Id::Zdef)
                .tolerance(Tolerance::Relative(0.01)),
        );
    }
    suite.extend([
        ExperimentConfig::new("tint2", full(Kernel::MomentOverS, 0.5, 2.0), 2000.0).identity(Id::Zdef),
        ExperimentConfig::new(
            "tint",
            full(Kernel::MomentOverS, 0.5, 2.0).with_weight(FRAC_1_SQRT_2),
            2000.0,
        )
        .identity(Id::Tint),
        ExperimentConfig::new(
            "tint2a",
            full(Kernel::MomentOverS, 1.5, 2.0).with_weight(0.5 * FRAC_1_SQRT_2),
            2000.0,
        )
        .identity(Id::Tint2A),
    ]);
    for (sigma, r) in [(0.5, 2.1), (0.5, 0.9), (0.5, 1.1), (1.0 / 3.0, 2.1), (0.75, 2.1), (0.875, 2.1), (1.0, 2.1)] {
        let label = match sigma {
            s if s == 1.0 / 3.0 => "1/3".to_string(),
            s => s.to_string(),
        };
        suite.push(
            ExperimentConfig::new(
                format!("sighalf-s{label}-r{r}"),
                half(Kernel::PlainMoment { m: 0 }, sigma, r),
                2000.0,
            )
            .identity(Id::Sighalf),
        );
    }
    suite.extend([
        ExperimentConfig::new("sig4-r4", half(Kernel::PlainMoment { m: 0 }, 4.0, 4.0), 1000.0)
            .identity(Id::Sig4)
            .slope(0.5, 0.1),
        ExperimentConfig::new("sighalf-r1", half(Kernel::PlainMoment { m: 0 }, 0.5, 1.0), 2000.0).identity(Id::Sighalf),
        ExperimentConfig::new("sighalf-r2", half(Kernel::PlainMoment { m: 0 }, 0.5, 2.0), 2000.0).identity(Id::Sighalf),
    ]);
    let residual_runs = [
        ("jd1", Id::Jd1, residual(), 3.0, 2.0),
        ("jdn", Id::Jdn, residual(), 4.0, 2.0),
        ("jdn2", Id::Jdn2, residual(), 0.5, 1.0),
        ("jday", Id::JdaY, Kernel::PlainMoment { m: 1 }, 4.0, 3.9),
        ("rneqn2d", Id::Rneqn2d, Kernel::PlainMoment { m: 1 }, 1.0 / 3.0, 1.5),
        ("reqn2d", Id::Reqn2d, residual(), 0.5, 2.0),
    ];
    for (name, id, kernel, sigma, r) in residual_runs {
        suite.push(
            ExperimentConfig::new(name, full(kernel, sigma, r), 2000.0)
                .identity(id)
                .tolerance(Tolerance::Absolute(0.1))
                .trend(),
        );
    }
    suite.extend([
        ExperimentConfig::new("ans", full(Kernel::MasterF, 0.5, 1.3), 2000.0).identity(Id::Ans),
        ExperimentConfig::new("zr", half(Kernel::PlainMoment { m: 0 }, 0.5, 1.0), 2000.0)
            .identity(Id::Zr)
            .asymptote(AsymptoteSource::Oracle),
    ]);
    suite
}

/// The experiment with the given id, if the built-in suite has one.
pub fn builtin(id: &str) -> Option<ExperimentConfig> {
    acceptance_suite().into_iter().find(|c| c.experiment_id == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{parse_config, suite_text};
    use std::collections::HashSet;

    #[test]
    fn suite_is_valid_and_ids_unique() {
        let suite = acceptance_suite();
        let ids: HashSet<_> = suite.iter().map(|c| c.experiment_id.as_str()).collect();
        assert_eq!(ids.len(), suite.len());
        for c in &suite {
            c.validate().unwrap();
        }
    }

    #[test]
    fn suite_round_trips_through_config_text() {
        let suite = acceptance_suite();
        assert_eq!(parse_config(&suite_text(&suite)).unwrap(), suite);
    }

    #[test]
    fn shipped_config_matches_builtin_suite() {
        let text = include_str!("../../../../configs/acceptance.conf");
        assert_eq!(parse_config(text).unwrap(), acceptance_suite());
    }
}
