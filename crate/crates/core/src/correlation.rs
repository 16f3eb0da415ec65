//! Interval statistics of real signals and shifted-segment autocorrelation
//! of `|ζ(σ+it)|` and friends.
//!
//! All interval integrals run on unit panels through the adaptive
//! Gauss–Kronrod driver; the five moments a correlation needs share one set
//! of nodes, so the discrete inner product is positive and Cauchy–Schwarz
//! holds to rounding.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::harness::cache::CacheGrid;
use crate::quadrature::{integrate_value, QuadVec, QuadratureError};
use crate::zeta::{self, ZetaError, HEIGHT_MAX, SIGMA_MAX, SIGMA_MIN};

/// Correlations above this count as "moderate".
pub const MODERATE_CORRELATION: f64 = 0.5;

/// Default segment length.
pub const DEFAULT_SEGMENT: f64 = 126.0;

/// Default ρ-scan step.
pub const DEFAULT_RHO_STEP: f64 = 0.1;

/// Default absolute tolerance on the interval integrals.
pub const DEFAULT_CORR_TOL: f64 = 1e-8;

/// Variances below this make a segment degenerate.
pub const MIN_VARIANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("degenerate segment: var_f = {var_f:e}, var_g = {var_g:e}")]
    DegenerateSegment { var_f: f64, var_g: f64 },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Real signal derived from `ζ(σ+it)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalComponent {
    Abs,
    AbsSq,
    Re,
    Im,
}

impl SignalComponent {
    pub const ALL: [SignalComponent; 4] = [Self::Abs, Self::AbsSq, Self::Re, Self::Im];

    pub fn apply(self, z: Complex64) -> f64 {
        match self {
            Self::Abs => z.norm(),
            Self::AbsSq => z.norm_sqr(),
            Self::Re => z.re,
            Self::Im => z.im,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Abs => "abs",
            Self::AbsSq => "abs_sq",
            Self::Re => "re",
            Self::Im => "im",
        }
    }
}

impl fmt::Display for SignalComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignalComponent {
    type Err = CorrelationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CorrelationError::InvalidRequest(format!("unknown component `{s}` (abs, abs_sq, re, im)")))
    }
}

/// Any real signal that can be sampled at height `t`.
pub trait Signal: Sync {
    fn value(&self, t: f64) -> Result<f64, ZetaError>;
}

/// Wraps an infallible closure as a [`Signal`].
pub struct FnSignal<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> Signal for FnSignal<F> {
    fn value(&self, t: f64) -> Result<f64, ZetaError> {
        Ok((self.0)(t))
    }
}

/// `component(ζ(σ+it))`, optionally read from a precomputed grid.
#[derive(Debug, Clone, Copy)]
pub struct ZetaSignal<'a> {
    pub sigma: f64,
    pub component: SignalComponent,
    cache: Option<&'a CacheGrid>,
}

impl<'a> ZetaSignal<'a> {
    pub fn new(sigma: f64, component: SignalComponent) -> Self {
        Self {
            sigma,
            component,
            cache: None,
        }
    }

    /// Interpolate from `grid` where it covers `t`; the grid must be at
    /// this signal's σ.
    pub fn with_cache(mut self, grid: &'a CacheGrid) -> Result<Self, CorrelationError> {
        if grid.sigma != self.sigma {
            return Err(CorrelationError::InvalidRequest(format!(
                "cache is at σ = {}, signal at σ = {}",
                grid.sigma, self.sigma
            )));
        }
        self.cache = Some(grid);
        Ok(self)
    }

    pub fn is_cached(&self) -> bool {
        self.cache.is_some()
    }
}

impl Signal for ZetaSignal<'_> {
    fn value(&self, t: f64) -> Result<f64, ZetaError> {
        let z = match self.cache.and_then(|g| g.interpolate(t)) {
            Some(z) => z,
            None => zeta::zeta(Complex64::new(self.sigma, t))?,
        };
        Ok(self.component.apply(z))
    }
}

/// Means, variances, covariance and correlation of a pair of signals on
/// one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub e_f: f64,
    pub e_g: f64,
    pub var_f: f64,
    pub var_g: f64,
    pub cov: f64,
    pub cor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCorrReport {
    pub sigma: f64,
    pub component: SignalComponent,
    pub l1: f64,
    pub l2: f64,
    pub rho: f64,
    pub e_f: f64,
    pub e_g: f64,
    pub var_f: f64,
    pub var_g: f64,
    pub cov: f64,
    pub cor: f64,
}

impl SegmentCorrReport {
    fn from_moments(sigma: f64, component: SignalComponent, l1: f64, l2: f64, rho: f64, m: Moments) -> Self {
        Self {
            sigma,
            component,
            l1,
            l2,
            rho,
            e_f: m.e_f,
            e_g: m.e_g,
            var_f: m.var_f,
            var_g: m.var_g,
            cov: m.cov,
            cor: m.cor,
        }
    }

    pub fn moments(&self) -> Moments {
        Moments {
            e_f: self.e_f,
            e_g: self.e_g,
            var_f: self.var_f,
            var_g: self.var_g,
            cov: self.cov,
            cor: self.cor,
        }
    }
}

fn check_interval(l1: f64, l2: f64, tol: f64) -> Result<(), CorrelationError> {
    if !(l2 > l1) || !l1.is_finite() || !l2.is_finite() {
        return Err(CorrelationError::InvalidRequest(format!("need finite L1 < L2, got [{l1}, {l2}]")));
    }
    if !(tol > 0.0) {
        return Err(CorrelationError::InvalidRequest(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Unit panels covering `[l1, l2]`; the last one may be shorter.
fn panels(l1: f64, l2: f64) -> Vec<(f64, f64)> {
    let n = ((l2 - l1) - 1e-9).ceil().max(1.0) as usize;
    (0..n)
        .map(|k| (l1 + k as f64, (l1 + (k + 1) as f64).min(l2)))
        .collect()
}

/// `∫_{l1}^{l2}` of a vector-valued integrand, panel by panel, summed in
/// panel order.
fn integrate_over<const N: usize, F>(f: F, l1: f64, l2: f64, tol: f64) -> Result<[f64; N], CorrelationError>
where
    F: Fn(f64) -> Result<QuadVec<N>, ZetaError> + Sync,
{
    let pieces = panels(l1, l2);
    let per_panel = tol / pieces.len() as f64;
    let parts: Vec<Result<QuadVec<N>, QuadratureError>> = pieces
        .par_iter()
        .enumerate()
        .map(|(index, &(a, b))| {
            integrate_value(&f, a, b, per_panel, 1)
                .map(|e| e.value)
                .map_err(|e| QuadratureError::Panel {
                    index,
                    t_start: a,
                    source: Box::new(e),
                })
        })
        .collect();
    let mut total = [0.0; N];
    for part in parts {
        let v = part?;
        for (acc, x) in total.iter_mut().zip(v.0) {
            *acc += x;
        }
    }
    Ok(total)
}

/// Interval mean `1/(L2−L1) ∫ f`, with absolute integral tolerance `tol`.
pub fn expectation<F>(f: F, l1: f64, l2: f64, tol: f64) -> Result<f64, CorrelationError>
where
    F: Fn(f64) -> f64 + Sync,
{
    expectation_of(&FnSignal(f), l1, l2, tol)
}

pub fn expectation_of<S: Signal + ?Sized>(signal: &S, l1: f64, l2: f64, tol: f64) -> Result<f64, CorrelationError> {
    check_interval(l1, l2, tol)?;
    let [sum] = integrate_over(|t| Ok(QuadVec([signal.value(t)?])), l1, l2, tol)?;
    Ok(sum / (l2 - l1))
}

/// Correlation statistics of two closures on `[l1, l2]`.
pub fn correlate<F, G>(f: F, g: G, l1: f64, l2: f64) -> Result<Moments, CorrelationError>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    correlate_with(&FnSignal(f), &FnSignal(g), l1, l2, DEFAULT_CORR_TOL)
}

/// Correlation statistics of two signals on `[l1, l2]`.
///
/// Moments are taken about a coarse pilot mean (panel midpoints) to avoid
/// cancellation when a signal sits on a large offset.
pub fn correlate_with<F, G>(f: &F, g: &G, l1: f64, l2: f64, tol: f64) -> Result<Moments, CorrelationError>
where
    F: Signal + ?Sized,
    G: Signal + ?Sized,
{
    check_interval(l1, l2, tol)?;
    let mids: Vec<f64> = panels(l1, l2).iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let mut pilot_f = 0.0;
    let mut pilot_g = 0.0;
    for &t in &mids {
        pilot_f += f.value(t)?;
        pilot_g += g.value(t)?;
    }
    pilot_f /= mids.len() as f64;
    pilot_g /= mids.len() as f64;

    let [sf, sg, sff, sgg, sfg] = integrate_over(
        |t| {
            let x = f.value(t)? - pilot_f;
            let y = g.value(t)? - pilot_g;
            Ok(QuadVec([x, y, x * x, y * y, x * y]))
        },
        l1,
        l2,
        tol,
    )?;
    let len = l2 - l1;
    let (mf, mg) = (sf / len, sg / len);
    let var_f = (sff / len - mf * mf).max(0.0);
    let var_g = (sgg / len - mg * mg).max(0.0);
    let cov = sfg / len - mf * mg;
    if var_f < MIN_VARIANCE || var_g < MIN_VARIANCE {
        return Err(CorrelationError::DegenerateSegment { var_f, var_g });
    }
    let cor = (cov / (var_f.sqrt() * var_g.sqrt())).clamp(-1.0, 1.0);
    Ok(Moments {
        e_f: pilot_f + mf,
        e_g: pilot_g + mg,
        var_f,
        var_g,
        cov,
        cor,
    })
}

struct Shifted<'s, S: ?Sized> {
    inner: &'s S,
    rho: f64,
}

impl<S: Signal + ?Sized> Signal for Shifted<'_, S> {
    fn value(&self, t: f64) -> Result<f64, ZetaError> {
        self.inner.value(t + self.rho)
    }
}

/// `correlate(f(t), f(t+ρ))` over `[l1, l1 + seg_len]` for any signal.
pub fn shifted_moments<S: Signal + ?Sized>(
    signal: &S,
    l1: f64,
    seg_len: f64,
    rho: f64,
    tol: f64,
) -> Result<Moments, CorrelationError> {
    if !(seg_len > 0.0) {
        return Err(CorrelationError::InvalidRequest(format!("segment length must be positive, got {seg_len}")));
    }
    if !(rho >= 0.0) {
        return Err(CorrelationError::InvalidRequest(format!("ρ must be non-negative, got {rho}")));
    }
    correlate_with(signal, &Shifted { inner: signal, rho }, l1, l1 + seg_len, tol)
}

/// Correlation setup for one ζ-derived signal.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedCorrelation<'a> {
    pub signal: ZetaSignal<'a>,
    pub tol: f64,
}

impl<'a> ShiftedCorrelation<'a> {
    pub fn new(sigma: f64, component: SignalComponent) -> Self {
        Self {
            signal: ZetaSignal::new(sigma, component),
            tol: DEFAULT_CORR_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_cache(mut self, grid: &'a CacheGrid) -> Result<Self, CorrelationError> {
        self.signal = self.signal.with_cache(grid)?;
        Ok(self)
    }

    fn check(&self, l1: f64, seg_len: f64, rho: f64) -> Result<(), CorrelationError> {
        let sigma = self.signal.sigma;
        if !(SIGMA_MIN..=SIGMA_MAX).contains(&sigma) {
            return Err(CorrelationError::InvalidRequest(format!(
                "σ = {sigma} outside [{SIGMA_MIN}, {SIGMA_MAX}]"
            )));
        }
        if !(l1 >= 0.0) {
            return Err(CorrelationError::InvalidRequest(format!("L1 must be non-negative, got {l1}")));
        }
        if sigma == 1.0 && l1 == 0.0 {
            return Err(CorrelationError::InvalidRequest("σ = 1 segment starts on the pole".into()));
        }
        if l1 + seg_len + rho > HEIGHT_MAX {
            return Err(CorrelationError::InvalidRequest(format!(
                "L1 + seg_len + ρ = {} exceeds {HEIGHT_MAX}",
                l1 + seg_len + rho
            )));
        }
        Ok(())
    }

    pub fn at(&self, l1: f64, seg_len: f64, rho: f64) -> Result<SegmentCorrReport, CorrelationError> {
        self.check(l1, seg_len, rho)?;
        let m = shifted_moments(&self.signal, l1, seg_len, rho, self.tol)?;
        Ok(SegmentCorrReport::from_moments(
            self.signal.sigma,
            self.signal.component,
            l1,
            l1 + seg_len,
            rho,
            m,
        ))
    }

    /// One report per ρ on `rho_from, rho_from + step, … ≤ rho_to`.
    pub fn scan(&self, l1: f64, seg_len: f64, rho_from: f64, rho_to: f64, step: f64) -> Result<RhoScan, CorrelationError> {
        let rhos = rho_grid(rho_from, rho_to, step)?;
        let results: Vec<_> = rhos.par_iter().map(|&rho| self.at(l1, seg_len, rho)).collect();
        Ok(RhoScan::new(rhos, results))
    }
}

/// `shifted_correlation` with the default tolerance and no cache.
pub fn shifted_correlation(
    sigma: f64,
    component: SignalComponent,
    l1: f64,
    seg_len: f64,
    rho: f64,
) -> Result<SegmentCorrReport, CorrelationError> {
    ShiftedCorrelation::new(sigma, component).at(l1, seg_len, rho)
}

/// `rho_scan` with the default tolerance and no cache.
pub fn rho_scan(
    sigma: f64,
    component: SignalComponent,
    l1: f64,
    seg_len: f64,
    rho_from: f64,
    rho_to: f64,
    rho_step: f64,
) -> Result<RhoScan, CorrelationError> {
    ShiftedCorrelation::new(sigma, component).scan(l1, seg_len, rho_from, rho_to, rho_step)
}

/// Grid points `from + k·step` up to `to` (inclusive, with slack for
/// rounding), computed by multiplication so they do not drift.
pub fn rho_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CorrelationError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(CorrelationError::InvalidRequest(format!("ρ step must be positive, got {step}")));
    }
    if !(to >= from) {
        return Err(CorrelationError::InvalidRequest(format!("empty ρ range [{from}, {to}]")));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| from + step * k as f64).collect())
}

/// A local maximum of a ρ-scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Grid index of the sampled maximum.
    pub index: usize,
    /// Parabolically refined location.
    pub rho: f64,
    /// Parabolically refined height.
    pub cor: f64,
}

/// Interior local maxima of `cor` over an equispaced `rho` grid, refined by
/// the parabola through each maximum and its neighbours.
pub fn local_maxima(rho: &[f64], cor: &[Option<f64>]) -> Vec<Peak> {
    let mut out = Vec::new();
    for i in 1..cor.len().saturating_sub(1) {
        let (Some(a), Some(b), Some(c)) = (cor[i - 1], cor[i], cor[i + 1]) else {
            continue;
        };
        if !(b > a && b >= c) {
            continue;
        }
        let h = rho[i + 1] - rho[i];
        let curv = a - 2.0 * b + c;
        let (dx, height) = if curv < 0.0 {
            let dx = 0.5 * (a - c) / curv;
            (dx, b - 0.25 * (a - c) * dx)
        } else {
            (0.0, b)
        };
        out.push(Peak {
            index: i,
            rho: rho[i] + dx * h,
            cor: height,
        });
    }
    out
}

/// Results of a ρ-scan, ordered by ρ.
#[derive(Debug, Clone)]
pub struct RhoScan {
    pub rhos: Vec<f64>,
    pub results: Vec<Result<SegmentCorrReport, CorrelationError>>,
    /// Every interior local maximum.
    pub local_maxima: Vec<Peak>,
    /// Local maxima whose sampled value exceeds [`MODERATE_CORRELATION`].
    pub peaks: Vec<Peak>,
}

impl RhoScan {
    pub fn new(rhos: Vec<f64>, results: Vec<Result<SegmentCorrReport, CorrelationError>>) -> Self {
        let cors: Vec<Option<f64>> = results.iter().map(|r| r.as_ref().ok().map(|r| r.cor)).collect();
        let local_maxima = local_maxima(&rhos, &cors);
        let peaks = local_maxima
            .iter()
            .copied()
            .filter(|p| cors[p.index].is_some_and(|c| c > MODERATE_CORRELATION))
            .collect();
        Self {
            rhos,
            results,
            local_maxima,
            peaks,
        }
    }

    pub fn reports(&self) -> impl Iterator<Item = &SegmentCorrReport> {
        self.results.iter().filter_map(|r| r.as_ref().ok())
    }

    /// Highest correlation with ρ inside `[lo, hi]`.
    pub fn max_in(&self, lo: f64, hi: f64) -> Option<&SegmentCorrReport> {
        self.reports()
            .filter(|r| r.rho >= lo - 1e-9 && r.rho <= hi + 1e-9)
            .max_by(|a, b| a.cor.total_cmp(&b.cor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn expectation_of_simple_functions() {
        assert!((expectation(|_| 3.5, 0.0, 10.0, 1e-12).unwrap() - 3.5).abs() < 1e-13);
        assert!((expectation(|t| t, 0.0, 2.0, 1e-12).unwrap() - 1.0).abs() < 1e-13);
        // partial last panel
        assert!((expectation(|t| t * t, 0.0, 2.5, 1e-12).unwrap() - 2.5f64.powi(2) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_correlations() {
        let f = |t: f64| (1.3 * t).sin() + 0.2 * t;
        let same = correlate(f, f, 0.0, 12.0).unwrap();
        assert!((same.cor - 1.0).abs() < 1e-10);
        let anti = correlate(f, |t| 4.0 - f(t), 0.0, 12.0).unwrap();
        assert!((anti.cor + 1.0).abs() < 1e-10);
        let affine = correlate(f, |t| 2.5 * f(t) + 7.0, 0.0, 12.0).unwrap();
        assert!((affine.cor - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_signal_is_degenerate() {
        let err = correlate(|_| 2.0, f64::sin, 0.0, 5.0).unwrap_err();
        assert!(matches!(err, CorrelationError::DegenerateSegment { .. }));
    }

    #[test]
    fn sine_autocorrelation_peaks_at_its_period() {
        let period = 7.0;
        let sig = FnSignal(move |t: f64| (2.0 * PI * t / period).sin());
        let rhos = rho_grid(0.0, 22.0, 0.1).unwrap();
        let cors: Vec<Option<f64>> = rhos
            .iter()
            .map(|&rho| shifted_moments(&sig, 0.0, 28.0, rho, 1e-10).ok().map(|m| m.cor))
            .collect();
        assert!((cors[0].unwrap() - 1.0).abs() < 1e-10);
        let peaks = local_maxima(&rhos, &cors);
        assert_eq!(peaks.len(), 3);
        for (k, p) in peaks.iter().enumerate() {
            assert!((p.rho - period * (k + 1) as f64).abs() < 1e-6, "{p:?}");
            assert!((p.cor - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn parabolic_refinement_recovers_vertex() {
        let rho: Vec<f64> = (0..5).map(|k| k as f64 * 0.5).collect();
        let cor: Vec<Option<f64>> = rho.iter().map(|x| Some(0.9 - (x - 1.13f64).powi(2))).collect();
        let peaks = local_maxima(&rho, &cor);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].rho - 1.13).abs() < 1e-12);
        assert!((peaks[0].cor - 0.9).abs() < 1e-12);
    }

    #[test]
    fn rho_zero_is_self_correlation() {
        let r = shifted_correlation(0.5, SignalComponent::Abs, 0.0, 20.0, 0.0).unwrap();
        assert!((r.cor - 1.0).abs() < 1e-10);
        assert_eq!(r.l2, 20.0);
    }

    #[test]
    fn component_parsing() {
        for c in SignalComponent::ALL {
            assert_eq!(c.to_string().parse::<SignalComponent>().unwrap(), c);
        }
        assert!("modulus".parse::<SignalComponent>().is_err());
    }

    #[test]
    fn cache_at_other_sigma_is_rejected() {
        let grid = CacheGrid::compute(0.75, 0.0, 0.05, 20).unwrap();
        assert!(ShiftedCorrelation::new(0.5, SignalComponent::Abs).with_cache(&grid).is_err());
    }

    #[test]
    fn grid_is_inclusive_and_drift_free() {
        let g = rho_grid(120.0, 145.0, 0.1).unwrap();
        assert_eq!(g.len(), 251);
        assert!((g[250] - 145.0).abs() < 1e-12);
        assert!(rho_grid(0.0, 1.0, 0.0).is_err());
    }
}
