//! Invariants of the quadrature, Cesàro and oracle layers.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use zeta_moments::cesaro::{accumulate, classify_growth_against, closest_approach, crossings, CesaroTrace, Verdict};
use zeta_moments::harness::{compute_trace, suite::builtin, ExperimentConfig};
use zeta_moments::oracles::{
    identity_rhs, sawtooth, z_oracle, FloorConvention, IdentityId, OracleError, PredictionKind, RRelation, SigmaRegime,
};
use zeta_moments::quadrature::{integrate_panel, master_f, unit_elements, Component, IntegrandSpec, Kernel};

fn wiggly(t: f64) -> f64 {
    t * (10.0 * t).sin() + (-t * t).exp() / (1.0 + t * t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn panel_additivity(a in -5.0..5.0f64, width in 0.1..6.0f64, frac in 0.01..0.99f64) {
        let b = a + width;
        let c = a + frac * width;
        let whole = integrate_panel(wiggly, a, b, 1e-12).unwrap();
        let left = integrate_panel(wiggly, a, c, 1e-12).unwrap();
        let right = integrate_panel(wiggly, c, b, 1e-12).unwrap();
        let gap = (left.value + right.value - whole.value).abs();
        prop_assert!(gap <= whole.err + left.err + right.err + 1e-13, "gap {gap:e}");
    }

    #[test]
    fn master_pairing(t in -30.0..30.0f64, pick in 0usize..3) {
        let r = [0.7, 1.5, 2.1][pick];
        let t = Complex64::new(t, 0.0);
        let sum = master_f(t, r).unwrap() + master_f(-Complex64::i() - t, r).unwrap();
        prop_assert!(sum.norm() < 1e-10, "{sum}");
    }

    #[test]
    fn mean_of_linear_growth(k in -80i32..80, n in 1usize..5000) {
        // dyadic slopes keep every partial sum exact
        let a = k as f64 / 8.0;
        let trace = accumulate(&vec![a; n]).unwrap();
        prop_assert_eq!(trace.final_partial(), a * n as f64);
        prop_assert_eq!(trace.final_mean(), a * (n as f64 + 1.0) / 2.0);
    }

    #[test]
    fn crossings_are_affine_invariant(
        seed in prop::collection::vec(-1.0..1.0f64, 60..200),
        level in -0.5..0.5f64,
        scale in 0.01..100.0f64,
        shift in -1e3..1e3f64,
        flip in any::<bool>(),
    ) {
        let base = accumulate(&seed).unwrap();
        let a = if flip { -scale } else { scale };
        let moved = CesaroTrace {
            partial: base.partial.iter().map(|p| a * p + shift).collect(),
            ..base.clone()
        };
        let before = crossings(&base, level);
        let after = crossings(&moved, a * level + shift);
        prop_assert_eq!(before.len(), after.len());
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x.t - y.t).abs() < 1e-9, "{} vs {}", x.t, y.t);
            prop_assert_eq!(x.rising, y.rising != flip);
        }
    }

    #[test]
    fn staircase_midpoint(n in 1u32..=10, sigma in 1.01..6.0f64) {
        let n = n as f64;
        let eps = 1e-6;
        let at = z_oracle(sigma, n).unwrap().finite_value().unwrap();
        let below = z_oracle(sigma, n - eps).unwrap().finite_value().unwrap();
        let above = z_oracle(sigma, n + eps).unwrap().finite_value().unwrap();
        prop_assert!((at - (below + above) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_periodicity(r in 0.001..50.0f64, m in 1u32..=20) {
        prop_assume!(!FloorConvention::default().is_integer(r));
        // r + m must carry the same fractional part for exactness to be meaningful
        let shifted = r + m as f64;
        prop_assume!(shifted - m as f64 == r);
        prop_assert_eq!(sawtooth(shifted), sawtooth(r));
    }

    #[test]
    fn ans_consistent_with_staircase(r in 0.01..40.0f64) {
        prop_assume!(!FloorConvention::default().is_integer(r));
        let strip = z_oracle(0.5, r).unwrap().finite_value().unwrap();
        let above = z_oracle(1.5, r).unwrap().finite_value().unwrap();
        let ans = identity_rhs(IdentityId::Ans, 0.5, r).unwrap().finite_value().unwrap();
        prop_assert!((strip - above - ans).abs() < 1e-12 * (1.0 + r));
        prop_assert!((ans + 2.0 * PI * r).abs() < 1e-12 * (1.0 + r));
    }

    #[test]
    fn staircase_branches_are_exhaustive(sigma in -4.0..6.0f64, r in 0.01..12.0f64, snap in any::<bool>()) {
        let r = if snap { r.round().max(1.0) } else { r };
        let floor = FloorConvention::default();
        match z_oracle(sigma, r) {
            Ok(p) => {
                prop_assert_eq!(p.branch.sigma_regime, SigmaRegime::of(sigma));
                prop_assert_eq!(p.branch.r_relation, floor.relation(r));
                prop_assert_eq!(snap, p.branch.r_relation == RRelation::AtInteger);
                prop_assert!(p.finite_value().unwrap().is_finite());
            }
            Err(OracleError::UnsupportedSigma(s)) => prop_assert!(s == 0.0 || s == 1.0),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn identities_fail_only_by_regime(sigma in -3.0..6.0f64, r in 0.05..8.0f64, snap in any::<bool>()) {
        let r = if snap { r.round().max(1.0) } else { r };
        for id in IdentityId::ALL {
            match identity_rhs(id, sigma, r) {
                Ok(p) => match p.kind {
                    PredictionKind::Finite(v) => prop_assert!(v.is_finite(), "{id}: {v}"),
                    PredictionKind::Divergent(order) => prop_assert!(order > 0.0),
                    PredictionKind::Indeterminate { .. } => prop_assert_eq!(id, IdentityId::Zr),
                },
                Err(OracleError::RegimeViolation { .. }) | Err(OracleError::UnsupportedSigma(_)) => {}
                Err(e) => prop_assert!(false, "{id} at ({sigma}, {r}): unexpected {e}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn imaginary_part_vanishes_by_antisymmetry(sigma in 1.05..4.0f64, r in 0.3..4.0f64) {
        let spec = IntegrandSpec::new(Kernel::MomentOverS, sigma, r).with_component(Component::Imag);
        let total: f64 = unit_elements(&spec, -50.0, 50.0, 1e-11).unwrap().iter().map(|e| e.value).sum();
        prop_assert!(total.abs() < 1e-8, "{total:e}");
    }
}

#[test]
fn cesaro_regularity_on_geometric_series() {
    // (C,1) keeps the sum of an absolutely convergent series; at finite n
    // the means trail it by exactly q(1 − qⁿ)/((1 − q)² n)
    let n = 10_000;
    for q in [0.5f64, -0.5, 0.9, -0.9, 1e-3] {
        let terms: Vec<f64> = (0..n).map(|k| q.powi(k as i32)).collect();
        let trace = accumulate(&terms).unwrap();
        let sum = 1.0 / (1.0 - q);
        let lag = q * (1.0 - q.powi(n as i32)) / ((1.0 - q) * (1.0 - q) * n as f64);
        assert!((trace.final_partial() - sum).abs() < 1e-10, "q={q}");
        assert!((trace.final_mean() - (sum - lag)).abs() < 1e-10, "q={q}");
        // and the lag shrinks like 1/n
        let at_half = trace.means[n / 2 - 1] - sum;
        assert!(((trace.final_mean() - sum) / at_half - 0.5).abs() < 1e-6, "q={q}");
    }
}

#[test]
fn aberrant_value_differs_by_pi_at_integers() {
    for n in 1..=50 {
        let n = n as f64;
        let aberrant = identity_rhs(IdentityId::Case123, 1.5, n).unwrap().finite_value().unwrap();
        let staircase = z_oracle(1.5, n).unwrap().finite_value().unwrap();
        assert_eq!(aberrant, 2.0 * PI * n);
        assert!((aberrant - staircase - PI).abs() < 1e-12 * n, "n={n}");
    }
}

fn assert_approach_from_above(id: &str, r: f64) {
    let trace = compute_trace(&builtin(id).unwrap()).unwrap();
    let asymptote = -PI * r;
    let approaches = closest_approach(&trace, asymptote);
    assert!(!approaches.is_empty());
    let deepest = trace.means.iter().map(|m| m - asymptote).fold(f64::INFINITY, f64::min);
    let below: Vec<_> = approaches.iter().filter(|a| a.distance <= 0.0).map(|a| a.t).collect();
    assert!(
        below.is_empty(),
        "r={r}: {} of {} closest approaches touch or cross the asymptote (at t = {below:?}); deepest excursion {deepest:.2e}",
        below.len(),
        approaches.len()
    );
}

#[test]
fn sighalf_means_approach_from_above_r2_1() {
    assert_approach_from_above("sighalf-s0.5-r2.1", 2.1);
}

#[test]
fn sighalf_means_approach_from_above_r1_1() {
    assert_approach_from_above("sighalf-s0.5-r1.1", 1.1);
}

#[test]
fn sig4_off_integer_means_converge_to_zero() {
    let spec = IntegrandSpec::new(Kernel::PlainMoment { m: 0 }, 4.0, 3.9);
    let cfg = ExperimentConfig::new("sig4-r3.9", spec, 1000.0).identity(IdentityId::Sig4);
    let trace = compute_trace(&cfg).unwrap();
    let class = classify_growth_against(&trace, Some(0.0)).unwrap();
    match class.verdict {
        Verdict::ConvergedTo(v) => assert!(v.abs() <= 0.05, "converged to {v}"),
        other => panic!(
            "{other:?}: final mean {:.4}, last-decile spread {:.3}, slope {:.2e}",
            trace.final_mean(),
            class.last_decile_spread,
            class.slope
        ),
    }
}
