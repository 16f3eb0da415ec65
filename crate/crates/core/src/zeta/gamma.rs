//! Complex gamma function (Lanczos, g = 7, nine coefficients) with reflection
//! for the left half-plane. Everything is computed in log space so that
//! `|Im z|` in the thousands neither overflows nor underflows.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// `ln Γ(z)` on some branch of the logarithm. Only `exp` of the result is
/// branch independent.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        Complex64::new(PI.ln(), 0.0) - ln_sin(z * PI) - ln_gamma(1.0 - z)
    } else {
        let x = z - 1.0;
        let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
        for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let w = x + LANCZOS_G + 0.5;
        HALF_LN_TWO_PI + (x + 0.5) * w.ln() - w + acc.ln()
    }
}

/// Complex gamma function.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `ln sin(z)` that stays finite for large `|Im z|`.
pub fn ln_sin(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 2.0 {
        return z.sin().ln();
    }
    if z.im > 0.0 {
        // sin z = e^{-iz} (1 - e^{2iz}) · i/2, with |e^{2iz}| = e^{-2 Im z} small
        let small = (2.0 * i * z).exp();
        -i * z + (1.0 - small).ln() + (0.5 * i).ln()
    } else {
        ln_sin(z.conj()).conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let g = gamma(Complex64::new(0.5, 0.0));
        assert!(rel(g, Complex64::new(PI.sqrt(), 0.0)) < 1e-13, "{g}");
    }

    #[test]
    fn gamma_integers_are_factorials() {
        let mut fact = 1.0;
        for n in 1..15 {
            let g = gamma(Complex64::new(n as f64, 0.0));
            assert!(rel(g, Complex64::new(fact, 0.0)) < 1e-13, "n={n}");
            fact *= n as f64;
        }
    }

    #[test]
    fn recurrence_holds_off_axis() {
        for &(re, im) in &[(0.3, 2.0), (-0.7, 5.5), (2.5, -11.0), (0.5, 40.0), (-0.4, -120.0)] {
            let s = Complex64::new(re, im);
            let lhs = gamma(s + 1.0);
            let rhs = s * gamma(s);
            assert!(rel(lhs, rhs) < 1e-12, "s={s} lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn reflection_matches_direct_near_the_seam() {
        // both branches of ln_gamma around Re z = 1/2
        let a = gamma(Complex64::new(0.5 + 1e-9, 3.0));
        let b = gamma(Complex64::new(0.5 - 1e-9, 3.0));
        assert!(rel(a, b) < 1e-8);
    }

    #[test]
    fn ln_sin_agrees_with_direct_sin() {
        for &(re, im) in &[(0.3, 2.5), (1.7, -3.0), (-2.2, 6.0)] {
            let z = Complex64::new(re, im);
            let lhs = ln_sin(z).exp();
            assert!(rel(lhs, z.sin()) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn modulus_on_large_imaginary_height() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        let t = 300.0;
        let lg = ln_gamma(Complex64::new(0.5, t));
        let expected = 0.5 * (PI.ln() - (PI * t - (2.0f64).ln()));
        assert!((lg.re - expected).abs() < 1e-10, "{} vs {}", lg.re, expected);
    }
}
