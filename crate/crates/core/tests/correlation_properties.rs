//! Statistical invariants of the correlation module, on synthetic signals
//! and on |ζ(σ+it)|.

use proptest::prelude::*;

use zeta_moments::correlation::{
    correlate_with, expectation_of, FnSignal, ShiftedCorrelation, SignalComponent, ZetaSignal, DEFAULT_CORR_TOL,
    DEFAULT_SEGMENT,
};
use zeta_moments::harness::cache_warm;

/// A few low-frequency sinusoids on a random offset.
#[derive(Debug, Clone)]
struct Smooth {
    offset: f64,
    waves: Vec<(f64, f64, f64)>,
}

impl Smooth {
    fn eval(&self, t: f64) -> f64 {
        self.offset + self.waves.iter().map(|&(a, w, p)| a * (w * t + p).sin()).sum::<f64>()
    }
}

fn smooth() -> impl Strategy<Value = Smooth> {
    (-5.0..5.0f64, prop::collection::vec((0.2..2.0f64, 0.1..3.0f64, 0.0..6.3f64), 1..4))
        .prop_map(|(offset, waves)| Smooth { offset, waves })
}

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (-20.0..20.0f64, 3.0..30.0f64).prop_map(|(l1, len)| (l1, l1 + len))
}

const TOL: f64 = DEFAULT_CORR_TOL;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_invariance(
        f in smooth(), g in smooth(), (l1, l2) in interval(),
        a in 0.1..10.0f64, b in -50.0..50.0f64, c in 0.1..10.0f64, d in -50.0..50.0f64,
    ) {
        let base = correlate_with(&FnSignal(|t| f.eval(t)), &FnSignal(|t| g.eval(t)), l1, l2, TOL).unwrap();
        let moved = correlate_with(
            &FnSignal(|t| a * f.eval(t) + b),
            &FnSignal(|t| c * g.eval(t) + d),
            l1, l2, TOL,
        ).unwrap();
        prop_assert!((base.cor - moved.cor).abs() < 1e-10, "{} vs {}", base.cor, moved.cor);
        let flipped = correlate_with(&FnSignal(|t| -a * f.eval(t) + b), &FnSignal(|t| g.eval(t)), l1, l2, TOL).unwrap();
        prop_assert!((base.cor + flipped.cor).abs() < 1e-10, "{} vs {}", base.cor, flipped.cor);
    }

    #[test]
    fn symmetry(f in smooth(), g in smooth(), (l1, l2) in interval()) {
        let fg = correlate_with(&FnSignal(|t| f.eval(t)), &FnSignal(|t| g.eval(t)), l1, l2, TOL).unwrap();
        let gf = correlate_with(&FnSignal(|t| g.eval(t)), &FnSignal(|t| f.eval(t)), l1, l2, TOL).unwrap();
        prop_assert!((fg.cor - gf.cor).abs() < 1e-12);
        prop_assert!((fg.cov - gf.cov).abs() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz(f in smooth(), g in smooth(), (l1, l2) in interval(), mix in -1.0..1.0f64) {
        // mixing g into f drives the pair towards the equality case
        let h = |t: f64| mix * g.eval(t) + (1.0 - mix.abs()) * f.eval(t);
        let m = correlate_with(&FnSignal(h), &FnSignal(|t| g.eval(t)), l1, l2, TOL).unwrap();
        prop_assert!(m.cov.abs() <= (m.var_f * m.var_g).sqrt() + 1e-12);
        prop_assert!(m.cor.abs() <= 1.0);
    }
}

fn reference_segments() -> [(f64, f64, f64); 4] {
    // (σ, L1, ρ)
    [(0.5, 0.0, 126.1), (0.5, 126.0, 126.1), (0.75, 0.0, 126.1), (0.75, 0.0, 136.5)]
}

#[test]
fn resolution_stability() {
    for (sigma, l1, rho) in reference_segments() {
        let at = |tol: f64| {
            ShiftedCorrelation::new(sigma, SignalComponent::Abs)
                .with_tol(tol)
                .at(l1, DEFAULT_SEGMENT, rho)
                .unwrap()
                .cor
        };
        let (coarse, fine) = (at(DEFAULT_CORR_TOL), at(DEFAULT_CORR_TOL / 2.0));
        assert!((coarse - fine).abs() < 1e-4, "σ={sigma} L1={l1} ρ={rho}: {coarse} vs {fine}");
    }
}

#[test]
fn expectation_of_zeta_modulus_is_resolution_stable() {
    let signal = ZetaSignal::new(0.5, SignalComponent::Abs);
    let coarse = expectation_of(&signal, 0.0, 126.0, 1e-6).unwrap();
    let fine = expectation_of(&signal, 0.0, 126.0, 1e-10).unwrap();
    assert!((coarse - fine).abs() <= 1e-4, "{coarse} vs {fine}");
    // mean of |ζ(1/2+it)| over a segment of this length sits near 1.4
    assert!(coarse > 1.0 && coarse < 2.0, "{coarse}");
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let (grid, _) = cache_warm(0.5, 0.0, 0.05, 7601, &dir.path().join("half.cache")).unwrap();
    let direct = ShiftedCorrelation::new(0.5, SignalComponent::Abs);
    let cached = direct.with_cache(&grid).unwrap();
    for rho in [10.0, 126.1, 140.0] {
        let a = direct.at(0.0, DEFAULT_SEGMENT, rho).unwrap();
        let b = cached.at(0.0, DEFAULT_SEGMENT, rho).unwrap();
        assert!((a.cor - b.cor).abs() <= 1e-6, "ρ={rho}: {} vs {}", a.cor, b.cor);
    }
}
