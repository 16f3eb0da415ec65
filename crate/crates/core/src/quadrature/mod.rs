//! Oscillation-aware integration of the moment integrands over unit panels.

mod gauss_kronrod;
mod integrand;

pub use gauss_kronrod::{gk21, QuadValue, QuadVec, RuleEstimate, MAX_SUBDIVISIONS, NODES_PER_RULE};
pub use integrand::{master_f, Component, Domain, IntegrandSpec, Kernel};

use rayon::prelude::*;
use thiserror::Error;

use crate::zeta::ZetaError;

/// Default absolute tolerance for one unit panel.
pub const DEFAULT_PANEL_TOL: f64 = 1e-9;

/// Width of one Cesàro element.
pub(crate) const ELEMENT_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("panel [{a}, {b}] did not reach tolerance {tol:e} (estimate {err:e})")]
    NonConvergence { a: f64, b: f64, err: f64, tol: f64 },
    #[error("panel {index} starting at t = {t_start}: {source}")]
    Panel {
        index: usize,
        t_start: f64,
        #[source]
        source: Box<QuadratureError>,
    },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Integral of `f` over `[a, b]` with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelIntegral {
    pub value: f64,
    pub err: f64,
}

/// Adaptive Gauss–Kronrod integral of a real function over `[a, b]`.
pub fn integrate_panel<F>(f: F, a: f64, b: f64, tol: f64) -> Result<PanelIntegral, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    try_integrate_panel(|t| Ok(f(t)), a, b, tol, 1)
}

/// As [`integrate_panel`] for integrands that can fail (zeta domain errors),
/// starting from `initial_pieces` equal sub-intervals.
pub fn try_integrate_panel<F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    initial_pieces: usize,
) -> Result<PanelIntegral, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, ZetaError>,
{
    check_interval(a, b, tol)?;
    let est = gauss_kronrod::adaptive(f, a, b, tol, initial_pieces)?;
    Ok(PanelIntegral {
        value: est.value,
        err: est.err,
    })
}

/// Adaptive integral of any [`QuadValue`] over `[a, b]`.
pub fn integrate_value<V, F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    initial_pieces: usize,
) -> Result<RuleEstimate<V>, QuadratureError>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V, ZetaError>,
{
    check_interval(a, b, tol)?;
    gauss_kronrod::adaptive(f, a, b, tol, initial_pieces)
}

fn check_interval(a: f64, b: f64, tol: f64) -> Result<(), QuadratureError> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::InvalidRequest(format!(
            "need finite a < b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(QuadratureError::InvalidRequest(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// One Cesàro element `h(t_j) = ∫_{t_j}^{t_j+1} f(t) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitElement {
    pub index: usize,
    pub t_start: f64,
    pub value: f64,
    pub quad_error_estimate: f64,
}

/// Minimum number of quadrature nodes for a unit panel whose integrand
/// oscillates at `angular_freq` radians per unit.
pub fn node_budget(angular_freq: f64) -> usize {
    let cycles = (angular_freq / (2.0 * std::f64::consts::PI)).ceil() as usize;
    16.max(8 * cycles)
}

/// Unit-width elements of `spec` covering `[t_from, t_to)`, one per unit
/// interval, in index order.
pub fn unit_elements(
    spec: &IntegrandSpec,
    t_from: f64,
    t_to: f64,
    tol: f64,
) -> Result<Vec<UnitElement>, QuadratureError> {
    elements_with_width(spec, t_from, t_to, tol, ELEMENT_WIDTH)
}

/// Test hook: elements of arbitrary width.
#[cfg(test)]
pub(crate) fn unit_elements_with_width(
    spec: &IntegrandSpec,
    t_from: f64,
    t_to: f64,
    tol: f64,
    width: f64,
) -> Result<Vec<UnitElement>, QuadratureError> {
    elements_with_width(spec, t_from, t_to, tol, width)
}

fn elements_with_width(
    spec: &IntegrandSpec,
    t_from: f64,
    t_to: f64,
    tol: f64,
    width: f64,
) -> Result<Vec<UnitElement>, QuadratureError> {
    if !(t_to - t_from >= width) {
        return Err(QuadratureError::InvalidRequest(format!(
            "range [{t_from}, {t_to}] is shorter than one element"
        )));
    }
    if !(tol > 0.0) {
        return Err(QuadratureError::InvalidRequest(format!("tolerance must be positive, got {tol}")));
    }
    spec.validate(t_from, t_to)?;
    let count = ((t_to - t_from) / width + 1e-9).floor() as usize;

    let results: Vec<Result<UnitElement, QuadratureError>> = (0..count)
        .into_par_iter()
        .map(|index| {
            let a = t_from + width * index as f64;
            let b = a + width;
            let pieces = spec.initial_pieces(a, b);
            let panel = try_integrate_panel(|t| spec.eval_component(t), a, b, tol, pieces).map_err(|e| {
                QuadratureError::Panel {
                    index,
                    t_start: a,
                    source: Box::new(e),
                }
            })?;
            Ok(UnitElement {
                index,
                t_start: a,
                value: panel.value * spec.domain_factor(),
                quad_error_estimate: panel.err * spec.domain_factor(),
            })
        })
        .collect();
    // report the lowest failing index regardless of scheduling
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_quarter_period() {
        let r = integrate_panel(f64::cos, 0.0, PI / 2.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ramp_times_fast_sine() {
        // closed-form antiderivative of t sin(10 t): (sin(10t) - 10 t cos(10t)) / 100
        let exact = (10f64.sin() - 10.0 * 10f64.cos()) / 100.0;
        let r = integrate_panel(|t| t * (10.0 * t).sin(), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - exact).abs() < 1e-10, "{} vs {}", r.value, exact);
        assert!((exact - 0.0784669).abs() < 1e-6);
    }

    #[test]
    fn zero_integrand_has_zero_error() {
        let r = integrate_panel(|_| 0.0, -3.0, 7.0, 1e-9).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.err, 0.0);
    }

    #[test]
    fn polynomial_exactness_of_the_base_rule() {
        // Kronrod 21 is exact through degree 31
        for deg in 0..=31 {
            let mut f = |t: f64| Ok::<f64, ZetaError>(t.powi(deg));
            let r = gk21(&mut f, 0.0, 1.0).unwrap();
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((r.value - exact).abs() < 1e-14, "deg {deg}: {}", r.value);
        }
    }

    #[test]
    fn bad_requests_are_rejected() {
        assert!(matches!(
            integrate_panel(f64::sin, 1.0, 1.0, 1e-9),
            Err(QuadratureError::InvalidRequest(_))
        ));
        assert!(matches!(
            integrate_panel(f64::sin, 0.0, 1.0, 0.0),
            Err(QuadratureError::InvalidRequest(_))
        ));
    }

    #[test]
    fn impossible_tolerance_reports_non_convergence() {
        // a jump discontinuity cannot be integrated to 1e-300
        let r = integrate_panel(|t| if t < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 1e-300);
        assert!(matches!(r, Err(QuadratureError::NonConvergence { .. })), "{r:?}");
    }

    #[test]
    fn node_budget_scales_with_frequency() {
        assert_eq!(node_budget(0.0), 16);
        assert_eq!(node_budget(6.0), 16);
        assert_eq!(node_budget(13.0), 24);
        assert_eq!(node_budget(60.0), 80);
    }

    #[test]
    fn one_unit_request_gives_one_element() {
        let spec = IntegrandSpec::new(Kernel::CosKernel { a: 1.0 }, 2.0, 1.0);
        let els = unit_elements(&spec, 3.0, 4.0, 1e-9).unwrap();
        assert_eq!(els.len(), 1);
        assert_eq!(els[0].index, 0);
        assert_eq!(els[0].t_start, 3.0);
    }

    #[test]
    fn half_width_elements_sum_to_unit_elements() {
        let spec = IntegrandSpec::new(Kernel::PlainMoment { m: 0 }, 2.0, 1.7);
        let unit = unit_elements(&spec, 0.0, 4.0, 1e-11).unwrap();
        let half = unit_elements_with_width(&spec, 0.0, 4.0, 1e-11, 0.5).unwrap();
        assert_eq!(half.len(), 8);
        for (j, u) in unit.iter().enumerate() {
            let pair = half[2 * j].value + half[2 * j + 1].value;
            assert!((u.value - pair).abs() < 1e-10);
        }
    }

    #[test]
    fn panel_errors_carry_their_index() {
        // σ = 4, heights past 5000 leave the zeta domain
        let spec = IntegrandSpec::new(Kernel::PlainMoment { m: 0 }, 4.0, 2.0);
        let err = unit_elements(&spec, 4998.0, 5002.0, 1e-9).unwrap_err();
        match err {
            QuadratureError::Panel { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
