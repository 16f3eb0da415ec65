//! Riemann zeta function and its first two derivatives on the strip
//! `-1 <= Re s <= 4`, `|Im s| <= 5000`.
//!
//! Evaluation is Euler–Maclaurin summation with `N >= |t|/π + 10` leading
//! terms, which is a valid analytic continuation for `Re s > -(2K - 1)`.
//! Derivatives are obtained by differentiating every term of the expansion
//! analytically (truncated Taylor "jets"), never by finite differences.

mod gamma;

pub use gamma::{gamma, ln_gamma, ln_sin};

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

/// Complex number used for `s`, `ζ(s)` and integrand values.
pub type ComplexValue = Complex64;

pub const SIGMA_MIN: f64 = -1.0;
pub const SIGMA_MAX: f64 = 4.0;
pub const HEIGHT_MAX: f64 = 5000.0;
/// Radius of the excluded disc around the pole at `s = 1`.
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ZetaError {
    #[error("ζ has a pole at s = 1 (requested s = {0})")]
    PoleAtOne(ComplexValue),
    #[error("s = {0} lies outside the supported strip -1 <= Re s <= 4, |Im s| <= 5000")]
    DomainError(ComplexValue),
    #[error("derivative order {0} is not supported (1 or 2)")]
    UnsupportedOrder(u32),
    #[error("non-finite result at s = {0}")]
    Overflow(ComplexValue),
}

/// Tuning knobs of the Euler–Maclaurin evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEvalParams {
    /// Number of leading Dirichlet terms `N`.
    pub series_terms: usize,
    /// Maximum number of Bernoulli correction terms `K`.
    pub bernoulli_order: usize,
    /// Corrections stop once a term drops below this fraction of the sum.
    pub target_rel_error: f64,
}

impl ZetaEvalParams {
    /// Parameters that meet the accuracy contract at height `t`.
    pub fn for_height(t: f64) -> Self {
        let n = ((t.abs() / PI).ceil() as usize + 10).max(30);
        ZetaEvalParams {
            series_terms: n,
            bernoulli_order: 40,
            target_rel_error: 1e-17,
        }
    }

    fn is_valid_for(&self, s: ComplexValue) -> bool {
        self.bernoulli_order >= 2
            && self.series_terms >= (s.im.abs() / PI).ceil() as usize + 10
            && s.re > -(2.0 * self.bernoulli_order as f64 - 1.0)
    }
}

/// `ζ(σ + it)` split into the pieces used by the integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaComponents {
    pub zeta_r: f64,
    pub zeta_i: f64,
    pub abs: f64,
    pub abs_sq: f64,
    /// Principal argument in `(-π, π]`.
    pub arg: f64,
}

/// `ζ(s)`.
pub fn zeta(s: ComplexValue) -> Result<ComplexValue, ZetaError> {
    check_domain(s)?;
    let params = ZetaEvalParams::for_height(s.im);
    finite(s, euler_maclaurin(s, 0, &params)[0])
}

/// `ζ(s)` with caller-supplied parameters. The parameters must satisfy the
/// accuracy preconditions (`N >= ceil(|t|/π) + 10`, `K >= 2`).
pub fn zeta_with(s: ComplexValue, params: &ZetaEvalParams) -> Result<ComplexValue, ZetaError> {
    check_domain(s)?;
    if !params.is_valid_for(s) {
        return Err(ZetaError::DomainError(s));
    }
    finite(s, euler_maclaurin(s, 0, params)[0])
}

/// `ζ^{(m)}(s)` for `m ∈ {1, 2}`.
pub fn zeta_derivative(s: ComplexValue, m: u32) -> Result<ComplexValue, ZetaError> {
    if !(1..=2).contains(&m) {
        return Err(ZetaError::UnsupportedOrder(m));
    }
    check_domain(s)?;
    let params = ZetaEvalParams::for_height(s.im);
    finite(s, euler_maclaurin(s, m as usize, &params)[m as usize])
}

/// `[ζ(s), ζ'(s), ζ''(s)]` up to `order` (later entries are zero).
pub fn zeta_jet(s: ComplexValue, order: u32) -> Result<[ComplexValue; 3], ZetaError> {
    if order > 2 {
        return Err(ZetaError::UnsupportedOrder(order));
    }
    check_domain(s)?;
    let params = ZetaEvalParams::for_height(s.im);
    let jet = euler_maclaurin(s, order as usize, &params);
    for v in &jet {
        finite(s, *v)?;
    }
    Ok(jet)
}

pub fn zeta_components(sigma: f64, t: f64) -> Result<ZetaComponents, ZetaError> {
    let z = zeta(ComplexValue::new(sigma, t))?;
    Ok(ZetaComponents::from(z))
}

impl From<ComplexValue> for ZetaComponents {
    fn from(z: ComplexValue) -> Self {
        let abs_sq = z.norm_sqr();
        let mut arg = z.arg();
        if arg == -PI {
            arg = PI;
        }
        ZetaComponents {
            zeta_r: z.re,
            zeta_i: z.im,
            abs: abs_sq.sqrt(),
            abs_sq,
            arg,
        }
    }
}

/// `χ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s)`, so that `ζ(s) = χ(s) ζ(1-s)`.
pub fn functional_factor(s: ComplexValue) -> ComplexValue {
    let ln_chi = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_sin(s * (PI / 2.0)) + ln_gamma(1.0 - s);
    ln_chi.exp()
}

fn check_domain(s: ComplexValue) -> Result<(), ZetaError> {
    if !(s.re.is_finite() && s.im.is_finite())
        || s.re < SIGMA_MIN
        || s.re > SIGMA_MAX
        || s.im.abs() > HEIGHT_MAX
    {
        return Err(ZetaError::DomainError(s));
    }
    if (s - 1.0).norm() < POLE_GUARD {
        return Err(ZetaError::PoleAtOne(s));
    }
    Ok(())
}

fn finite(s: ComplexValue, z: ComplexValue) -> Result<ComplexValue, ZetaError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(ZetaError::Overflow(s))
    }
}

/// `ln j` for `j < LOG_TABLE_LEN`; covers `N` up to `5000/π + 10`.
const LOG_TABLE_LEN: usize = 1700;

fn log_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..LOG_TABLE_LEN).map(|j| (j.max(1) as f64).ln()).collect())
}

/// `B_{2k} / (2k)!` for `k = 1..=64`, from `B_{2k}/(2k)! = (-1)^{k+1} 2 ζ(2k) / (2π)^{2k}`.
fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let two_pi_sq = (2.0 * PI) * (2.0 * PI);
        let mut out = Vec::with_capacity(64);
        let mut scale = 1.0;
        for k in 1..=64usize {
            scale /= two_pi_sq;
            let exponent = 2 * k as i32;
            let zeta_2k = match k {
                1 => PI.powi(2) / 6.0,
                2 => PI.powi(4) / 90.0,
                3 => PI.powi(6) / 945.0,
                4 => PI.powi(8) / 9450.0,
                // direct sum plus the midpoint integral of the tail
                _ => {
                    let head: f64 = (1..=200).rev().map(|j| (j as f64).powi(-exponent)).sum();
                    head + 200.5f64.powi(1 - exponent) / (exponent - 1) as f64
                }
            };
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out.push(sign * 2.0 * zeta_2k * scale);
        }
        out
    })
}

/// Second-order truncated Taylor series in `s`: value and two derivatives.
#[derive(Debug, Clone, Copy)]
struct Jet([ComplexValue; 3]);

impl Jet {
    fn constant(v: ComplexValue) -> Self {
        Jet([v, ComplexValue::new(0.0, 0.0), ComplexValue::new(0.0, 0.0)])
    }

    fn identity(s: ComplexValue) -> Self {
        Jet([s, ComplexValue::new(1.0, 0.0), ComplexValue::new(0.0, 0.0)])
    }

    fn mul(self, o: Jet) -> Jet {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Jet([a0 * b0, a1 * b0 + a0 * b1, a2 * b0 + 2.0 * a1 * b1 + a0 * b2])
    }

    fn add(self, o: Jet) -> Jet {
        Jet([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    fn scale(self, c: f64) -> Jet {
        Jet([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }

    fn recip(self) -> Jet {
        let [a0, a1, a2] = self.0;
        let inv = 1.0 / a0;
        let d1 = -a1 * inv * inv;
        let d2 = (2.0 * a1 * a1 * inv - a2) * inv * inv;
        Jet([inv, d1, d2])
    }

    /// `x^{-s}` for real `x > 0` as a jet in `s`, times `factor`.
    fn power_neg_s(ln_x: f64, s: ComplexValue, factor: f64) -> Jet {
        let v = (-s * ln_x).exp() * factor;
        Jet([v, -v * ln_x, v * (ln_x * ln_x)])
    }
}

/// Euler–Maclaurin evaluation returning `[ζ, ζ', ζ'']` up to `order`.
fn euler_maclaurin(s: ComplexValue, order: usize, params: &ZetaEvalParams) -> [ComplexValue; 3] {
    let n = params.series_terms;
    let logs = log_table();
    let ln_n = if n < LOG_TABLE_LEN { logs[n] } else { (n as f64).ln() };

    let zero = ComplexValue::new(0.0, 0.0);
    let (sigma, t) = (s.re, s.im);
    let mut sum = [zero; 3];
    // Dirichlet head, summed from the small terms up.
    for j in (2..n).rev() {
        let lj = if j < LOG_TABLE_LEN { logs[j] } else { (j as f64).ln() };
        let mag = (-sigma * lj).exp();
        let (sin, cos) = (t * lj).sin_cos();
        let term = ComplexValue::new(mag * cos, -mag * sin);
        sum[0] += term;
        if order >= 1 {
            sum[1] -= term * lj;
        }
        if order >= 2 {
            sum[2] += term * (lj * lj);
        }
    }
    sum[0] += 1.0;

    let s_jet = Jet::identity(s);
    let n_pow = Jet::power_neg_s(ln_n, s, 1.0); // N^{-s}
    // N^{1-s} / (s - 1) + N^{-s} / 2
    let tail = n_pow
        .scale(n as f64)
        .mul(s_jet.add(Jet::constant(ComplexValue::new(-1.0, 0.0))).recip())
        .add(n_pow.scale(0.5));

    // Σ_k B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1}
    let ratios = bernoulli_ratios();
    let inv_n = 1.0 / n as f64;
    let inv_n_sq = inv_n * inv_n;
    let mut rising = s_jet; // s(s+1)…(s+2k-2), k = 1
    let mut power = n_pow.scale(inv_n); // N^{-s-1}
    let mut corr = Jet::constant(zero);
    let kmax = params.bernoulli_order.min(ratios.len());
    let scale = sum[0].norm().max(tail.0[0].norm()).max(1e-300);
    let mut prev_mag = f64::INFINITY;
    for (k, &ratio) in ratios.iter().enumerate().take(kmax) {
        let term = rising.mul(power).scale(ratio);
        let mag = term.0[..=order].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if mag > prev_mag {
            // asymptotic series started to diverge; keep what we have
            break;
        }
        corr = corr.add(term);
        prev_mag = mag;
        if mag < params.target_rel_error * scale {
            break;
        }
        let a = 2.0 * (k + 1) as f64 - 1.0;
        rising = rising
            .mul(s_jet.add(Jet::constant(ComplexValue::new(a, 0.0))))
            .mul(s_jet.add(Jet::constant(ComplexValue::new(a + 1.0, 0.0))));
        power = power.scale(inv_n_sq);
    }

    let mut out = [zero; 3];
    for i in 0..=order {
        out[i] = sum[i] + tail.0[i] + corr.0[i];
    }
    out
}
