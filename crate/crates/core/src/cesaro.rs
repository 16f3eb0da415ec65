//! Cesàro (C,1) regularisation of partial integrals and the analyses run on
//! the resulting traces.

use thiserror::Error;

use crate::quadrature::UnitElement;

/// Minimum trace length accepted by [`classify_growth`].
pub const MIN_CLASSIFY_LEN: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CesaroError {
    #[error("empty element sequence")]
    Empty,
    #[error("trace has {len} samples, need at least {need}")]
    TooShort { len: usize, need: usize },
    #[error("found {found} same-direction crossings, need at least {need}")]
    InsufficientCrossings { found: usize, need: usize },
    #[error("cesaro order must be at least 1")]
    ZeroOrder,
}

/// Elements, partial sums and running means on a common abscissa grid.
///
/// `t_grid[m]` is the upper limit of the partial integral `partial[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroTrace {
    pub elements: Vec<f64>,
    pub partial: Vec<f64>,
    /// Sequence averaged by `means` (the partial sums when `order == 1`).
    pub p: Vec<f64>,
    pub means: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub order: u32,
}

impl CesaroTrace {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn final_mean(&self) -> f64 {
        *self.means.last().expect("traces are nonempty")
    }

    pub fn final_partial(&self) -> f64 {
        *self.partial.last().expect("traces are nonempty")
    }
}

/// (C,1) trace of unit elements starting at `t = 0`.
pub fn accumulate(elements: &[f64]) -> Result<CesaroTrace, CesaroError> {
    accumulate_with(elements, 0.0, 1.0, 1)
}

/// Trace of quadrature elements, abscissae taken from the panels.
pub fn accumulate_elements(elements: &[UnitElement], order: u32) -> Result<CesaroTrace, CesaroError> {
    let first = elements.first().ok_or(CesaroError::Empty)?;
    let values: Vec<f64> = elements.iter().map(|e| e.value).collect();
    let width = match elements.get(1) {
        Some(next) => next.t_start - first.t_start,
        None => crate::quadrature::ELEMENT_WIDTH,
    };
    accumulate_with(&values, first.t_start, width, order)
}

/// General form: elements of width `dt` starting at `t0`.
///
/// `order = 1` averages the partial sums themselves. Each further order
/// replaces the averaged sequence by its own running sum before the final
/// mean, so `order = 2` gives `P_k = Σ_{m≤k} H(t_m)`.
pub fn accumulate_with(elements: &[f64], t0: f64, dt: f64, order: u32) -> Result<CesaroTrace, CesaroError> {
    if elements.is_empty() {
        return Err(CesaroError::Empty);
    }
    if order == 0 {
        return Err(CesaroError::ZeroOrder);
    }
    let partial = running_sum(elements);
    let mut p = partial.clone();
    for _ in 1..order {
        p = running_sum(&p);
    }
    let means = running_sum(&p)
        .into_iter()
        .enumerate()
        .map(|(k, s)| s / (k + 1) as f64)
        .collect();
    let t_grid = (1..=elements.len()).map(|m| t0 + dt * m as f64).collect();
    Ok(CesaroTrace {
        elements: elements.to_vec(),
        partial,
        p,
        means,
        t_grid,
        order,
    })
}

fn running_sum(xs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    xs.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    ConvergedTo(f64),
    LinearDivergence(f64),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthClassification {
    pub verdict: Verdict,
    /// Index range `[start, end)` of the fitted means.
    pub fit_window: (usize, usize),
    /// RMS deviation of the means from the fitted line.
    pub fit_residual: f64,
    /// Fitted slope of the means per unit `t`.
    pub slope: f64,
    /// Fitted slope of the partial sums over the same window.
    pub partial_slope: f64,
    /// Peak-to-peak spread of the means over the last decile.
    pub last_decile_spread: f64,
    /// Mean of the means over the last decile.
    pub last_decile_mean: f64,
}

/// Slope magnitude floor for a divergence verdict.
pub const DIVERGENCE_MIN_SLOPE: f64 = 1e-3;
/// Ratio between the line's rise over the window and the residual RMS.
pub const DIVERGENCE_SIGNAL_RATIO: f64 = 10.0;
/// Slope ceiling for a convergence verdict.
pub const CONVERGENCE_MAX_SLOPE: f64 = 1e-4;

/// Classify using the trace's own last-decile level as the asymptote scale.
pub fn classify_growth(trace: &CesaroTrace) -> Result<GrowthClassification, CesaroError> {
    classify_growth_against(trace, None)
}

/// Line fit of the means over the last half of the trace.
///
/// Divergence needs `|slope| > 1e-3` and a rise across the window of more
/// than ten times the residual RMS. Convergence needs `|slope| < 1e-4` and
/// a last-decile spread below 1% of `|asymptote|` (0.05 absolute when the
/// asymptote is zero).
pub fn classify_growth_against(
    trace: &CesaroTrace,
    asymptote: Option<f64>,
) -> Result<GrowthClassification, CesaroError> {
    let n = trace.len();
    if n < MIN_CLASSIFY_LEN {
        return Err(CesaroError::TooShort {
            len: n,
            need: MIN_CLASSIFY_LEN,
        });
    }
    let start = n / 2;
    let xs = &trace.t_grid[start..];
    let (slope, intercept) = line_fit(xs, &trace.means[start..]);
    let (partial_slope, _) = line_fit(xs, &trace.partial[start..]);
    let rms = (xs
        .iter()
        .zip(&trace.means[start..])
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();

    let decile = &trace.means[n - n / 10..];
    let hi = decile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = decile.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi - lo;
    let level = decile.iter().sum::<f64>() / decile.len() as f64;

    let window_len = xs[xs.len() - 1] - xs[0];
    let scale = asymptote.unwrap_or(level).abs();
    let spread_ok = if scale == 0.0 { spread < 0.05 } else { spread < 0.01 * scale };

    let verdict = if slope.abs() > DIVERGENCE_MIN_SLOPE && slope.abs() * window_len > DIVERGENCE_SIGNAL_RATIO * rms {
        Verdict::LinearDivergence(slope)
    } else if slope.abs() < CONVERGENCE_MAX_SLOPE && spread_ok {
        Verdict::ConvergedTo(level)
    } else {
        Verdict::Inconclusive
    };
    Ok(GrowthClassification {
        verdict,
        fit_window: (start, n),
        fit_residual: rms,
        slope,
        partial_slope,
        last_decile_spread: spread,
        last_decile_mean: level,
    })
}

/// Least-squares `(slope, intercept)`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// One crossing of the partial sums through the asymptote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub t: f64,
    /// `true` when the partial sum passes from below to above.
    pub rising: bool,
}

/// Linearly interpolated crossings of the partial sums, increasing in `t`.
pub fn crossings(trace: &CesaroTrace, asymptote: f64) -> Vec<Crossing> {
    sign_changes(&trace.t_grid, &trace.partial, asymptote)
}

fn sign_changes(ts: &[f64], ys: &[f64], level: f64) -> Vec<Crossing> {
    let mut out = Vec::new();
    // last sample strictly off the level
    let mut prev: Option<(usize, f64)> = None;
    for (k, &y) in ys.iter().enumerate() {
        let d = y - level;
        if d == 0.0 {
            continue;
        }
        if let Some((j, dj)) = prev {
            if dj.signum() != d.signum() {
                let t = if j + 1 == k {
                    ts[j] + (ts[k] - ts[j]) * dj / (dj - d)
                } else {
                    // touched the level exactly; report the first touching sample
                    ts[j + 1]
                };
                out.push(Crossing { t, rising: d > 0.0 });
            }
        }
        prev = Some((k, d));
    }
    out
}

/// A local minimum of `|means − asymptote|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approach {
    pub t: f64,
    /// Signed; positive when the means lie above the asymptote.
    pub distance: f64,
}

/// Local minima of `|means − asymptote|`, refined by a parabola through
/// the three samples around each minimum.
pub fn closest_approach(trace: &CesaroTrace, asymptote: f64) -> Vec<Approach> {
    let ts = &trace.t_grid;
    let d: Vec<f64> = trace.means.iter().map(|m| m - asymptote).collect();
    let mut out = Vec::new();
    for k in 1..d.len().saturating_sub(1) {
        let (a, b, c) = (d[k - 1].abs(), d[k].abs(), d[k + 1].abs());
        if !(b <= a && b <= c) {
            continue;
        }
        let same_side = d[k - 1].signum() == d[k].signum() && d[k + 1].signum() == d[k].signum();
        if !same_side || b == 0.0 {
            // the means pass through the asymptote here
            out.push(Approach {
                t: ts[k],
                distance: 0.0,
            });
            continue;
        }
        let (t, v) = parabola_vertex(ts[k - 1], ts[k], ts[k + 1], d[k - 1], d[k], d[k + 1]);
        out.push(Approach { t, distance: v });
    }
    out
}

/// Vertex of the parabola through three points, clamped to their span;
/// falls back to the middle sample when the points are collinear.
fn parabola_vertex(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    let c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / denom;
    if a == 0.0 || !a.is_finite() {
        return (x1, y1);
    }
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    (xv, (a * xv + b) * xv + c)
}

/// Minima that stand out from their surroundings: the rise of
/// `|means − asymptote|` on the lower of the two sides, before a deeper
/// minimum or the trace end is reached, must be at least
/// `min_relative_prominence` of that rise plus the minimum's own distance.
/// Drops the ripples riding on the dominant oscillation and the start-up
/// transient.
pub fn principal_minima(trace: &CesaroTrace, asymptote: f64, min_relative_prominence: f64) -> Vec<Approach> {
    let g: Vec<f64> = trace.means.iter().map(|m| (m - asymptote).abs()).collect();
    closest_approach(trace, asymptote)
        .into_iter()
        .filter(|a| {
            let k = nearest_index(&trace.t_grid, a.t);
            let base = g[k].min(a.distance.abs());
            let side_max = |range: &mut dyn Iterator<Item = usize>| {
                let mut hi = base;
                for j in range {
                    if g[j] < base {
                        break;
                    }
                    hi = hi.max(g[j]);
                }
                hi
            };
            let left = side_max(&mut (0..k).rev());
            let right = side_max(&mut (k + 1..g.len()));
            let prominence = left.min(right) - base;
            prominence > 0.0 && prominence >= min_relative_prominence * (prominence + base)
        })
        .collect()
}

fn nearest_index(ts: &[f64], t: f64) -> usize {
    match ts.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(k) => k,
        Err(0) => 0,
        Err(k) if k >= ts.len() => ts.len() - 1,
        Err(k) => {
            if t - ts[k - 1] <= ts[k] - t {
                k - 1
            } else {
                k
            }
        }
    }
}

/// Collapses runs of crossings closer than `min_gap`: an odd-sized run is
/// one net crossing (reported at its middle member, in the direction of the
/// run's first member), an even-sized run is a touch-and-return and
/// disappears.
pub fn debounce_crossings(all: &[Crossing], min_gap: f64) -> Vec<Crossing> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].t - all[j].t < min_gap {
            j += 1;
        }
        let run = &all[i..=j];
        if run.len() % 2 == 1 {
            out.push(Crossing {
                t: run[run.len() / 2].t,
                rising: run[0].rising,
            });
        }
        i = j + 1;
    }
    out
}

/// Periodicity of the asymptote crossings.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEstimate {
    /// Mean spacing of same-direction crossings.
    pub period: f64,
    /// Fitted change in spacing per successive crossing.
    pub phase_drift: f64,
    /// `(T_k − T_0) / period` for each direction, in order.
    pub ratios: Vec<f64>,
    /// Largest distance of a ratio from its nearest integer.
    pub max_ratio_residual: f64,
    pub crossings: Vec<Crossing>,
}

/// Number of crossings [`period_estimate`] requires.
pub const MIN_CROSSINGS: usize = 4;

pub fn period_estimate(trace: &CesaroTrace, asymptote: f64) -> Result<PeriodEstimate, CesaroError> {
    period_from_crossings(crossings(trace, asymptote))
}

/// As [`period_estimate`] after merging crossings closer than `min_gap`.
pub fn period_estimate_debounced(
    trace: &CesaroTrace,
    asymptote: f64,
    min_gap: f64,
) -> Result<PeriodEstimate, CesaroError> {
    period_from_crossings(debounce_crossings(&crossings(trace, asymptote), min_gap))
}

/// Period analysis for an arbitrary crossing list.
pub fn period_from_crossings(all: Vec<Crossing>) -> Result<PeriodEstimate, CesaroError> {
    if all.len() < MIN_CROSSINGS {
        return Err(CesaroError::InsufficientCrossings {
            found: all.len(),
            need: MIN_CROSSINGS,
        });
    }
    let groups: Vec<Vec<f64>> = [true, false]
        .iter()
        .map(|&dir| all.iter().filter(|c| c.rising == dir).map(|c| c.t).collect())
        .collect();
    let spacings: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| g.windows(2).map(|w| w[1] - w[0]).collect())
        .collect();
    let pooled: Vec<f64> = spacings.iter().flatten().copied().collect();
    if pooled.is_empty() {
        return Err(CesaroError::InsufficientCrossings {
            found: all.len(),
            need: MIN_CROSSINGS,
        });
    }
    let period = pooled.iter().sum::<f64>() / pooled.len() as f64;

    // drift: pooled least-squares slope of spacing against its ordinal
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for s in &spacings {
        for (k, v) in s.iter().enumerate() {
            xs.push(k as f64);
            ys.push(*v);
        }
    }
    let (phase_drift, _) = line_fit(&xs, &ys);

    let mut ratios = Vec::new();
    let mut max_ratio_residual: f64 = 0.0;
    for g in &groups {
        for &t in g.iter().skip(1) {
            let q = (t - g[0]) / period;
            max_ratio_residual = max_ratio_residual.max((q - q.round()).abs());
            ratios.push(q);
        }
    }
    Ok(PeriodEstimate {
        period,
        phase_drift,
        ratios,
        max_ratio_residual,
        crossings: all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn trace_of_partial(partial: &[f64]) -> CesaroTrace {
        let mut elements = vec![partial[0]];
        elements.extend(partial.windows(2).map(|w| w[1] - w[0]));
        accumulate(&elements).unwrap()
    }

    #[test]
    fn ones_give_triangular_means() {
        let n = 50;
        let tr = accumulate(&vec![1.0; n]).unwrap();
        assert_eq!(tr.partial, (1..=n).map(|k| k as f64).collect::<Vec<_>>());
        assert_eq!(tr.final_mean(), (n as f64 + 1.0) / 2.0);
    }

    #[test]
    fn grandi_type_means_tend_to_half() {
        let c = 3.0;
        let els: Vec<f64> = (0..10_001).map(|k| if k % 2 == 0 { c } else { -c }).collect();
        let tr = accumulate(&els).unwrap();
        assert!((tr.final_mean() - c / 2.0).abs() < 1e-3);
    }

    #[test]
    fn empty_is_rejected() {
        assert_eq!(accumulate(&[]), Err(CesaroError::Empty));
        assert_eq!(accumulate_with(&[1.0], 0.0, 1.0, 0), Err(CesaroError::ZeroOrder));
    }

    #[test]
    fn second_order_is_the_double_sum() {
        let tr = accumulate_with(&[1.0, 2.0, 3.0], 0.0, 1.0, 2).unwrap();
        assert_eq!(tr.partial, vec![1.0, 3.0, 6.0]);
        assert_eq!(tr.p, vec![1.0, 4.0, 10.0]);
        assert_eq!(tr.means, vec![1.0, 2.5, 5.0]);
    }

    #[test]
    fn grid_follows_element_ends() {
        let tr = accumulate_with(&[1.0, 1.0], 5.0, 0.5, 1).unwrap();
        assert_eq!(tr.t_grid, vec![5.5, 6.0]);
    }

    #[test]
    fn constant_means_converge() {
        let mut els = vec![0.0; 400];
        els[0] = 2.5;
        let g = classify_growth(&accumulate(&els).unwrap()).unwrap();
        assert_eq!(g.verdict, Verdict::ConvergedTo(2.5));
        assert_eq!(g.slope, 0.0);
    }

    #[test]
    fn linear_partial_sums_diverge_at_half_rate() {
        let tr = accumulate(&vec![1.0; 1000]).unwrap();
        match classify_growth(&tr).unwrap().verdict {
            Verdict::LinearDivergence(s) => assert!((s - 0.5).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn short_trace_is_an_error() {
        let tr = accumulate(&[1.0; 10]).unwrap();
        assert!(matches!(classify_growth(&tr), Err(CesaroError::TooShort { .. })));
    }

    #[test]
    fn crossing_at_midpoint() {
        let tr = trace_of_partial(&[0.0, 2.0]);
        let c = crossings(&tr, 1.0);
        assert_eq!(c.len(), 1);
        assert!((c[0].t - 1.5).abs() < 1e-15);
        assert!(c[0].rising);
    }

    #[test]
    fn no_crossings_above_asymptote() {
        let tr = trace_of_partial(&[1.0, 3.0, 2.0, 5.0]);
        assert!(crossings(&tr, -1.0).is_empty());
    }

    #[test]
    fn touching_sample_counts_once() {
        let tr = trace_of_partial(&[-1.0, 0.0, 1.0]);
        let c = crossings(&tr, 0.0);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].t, 2.0);
    }

    #[test]
    fn simple_minimum() {
        let tr = CesaroTrace {
            elements: vec![0.0; 3],
            partial: vec![0.0; 3],
            p: vec![0.0; 3],
            means: vec![3.0, 1.0, 2.0],
            t_grid: vec![1.0, 2.0, 3.0],
            order: 1,
        };
        let m = closest_approach(&tr, 0.0);
        assert_eq!(m.len(), 1);
        assert!((m[0].t - 2.0).abs() < 0.5);
        assert!(m[0].distance > 0.0 && m[0].distance <= 1.0);
    }

    #[test]
    fn flat_at_asymptote_has_zero_distance() {
        let tr = accumulate(&[0.0; 20]).unwrap();
        let m = closest_approach(&tr, 0.0);
        assert!(!m.is_empty());
        assert!(m.iter().all(|a| a.distance == 0.0));
    }

    #[test]
    fn principal_minima_drop_ripples() {
        // deep dips every 100 units with a shallow ripple between them
        let means: Vec<f64> = (1..=400)
            .map(|k| {
                let t = k as f64;
                1.0 - (2.0 * PI * t / 100.0).cos() + 0.05 * (2.0 * PI * t / 13.0).sin().abs() + 0.001
            })
            .collect();
        let n = means.len();
        let tr = CesaroTrace {
            elements: vec![0.0; n],
            partial: vec![0.0; n],
            p: vec![0.0; n],
            means,
            t_grid: (1..=n).map(|k| k as f64).collect(),
            order: 1,
        };
        let all = closest_approach(&tr, 0.0);
        let kept = principal_minima(&tr, 0.0, 0.5);
        assert!(all.len() > kept.len());
        assert_eq!(kept.len(), 3, "{kept:?}");
        for (k, a) in kept.iter().enumerate() {
            assert!((a.t - 100.0 * (k + 1) as f64).abs() < 3.0, "{a:?}");
        }
    }

    #[test]
    fn debounce_merges_ripple_runs() {
        let c = |t, rising| Crossing { t, rising };
        let raw = [c(10.0, true), c(50.0, false), c(52.0, true), c(54.0, false), c(90.0, true), c(91.0, false)];
        let d = debounce_crossings(&raw, 5.0);
        assert_eq!(d, vec![c(10.0, true), c(52.0, false)]);
    }

    #[test]
    fn synthetic_sine_period() {
        let p = 37.3;
        let asym = -4.0;
        let partial: Vec<f64> = (1..=2000)
            .map(|k| asym + 5.0 * (2.0 * PI * k as f64 / p).sin())
            .collect();
        let est = period_estimate(&trace_of_partial(&partial), asym).unwrap();
        assert!((est.period - p).abs() < 0.01 * p, "{}", est.period);
        assert!(est.phase_drift.abs() < 1e-3);
        assert!(est.max_ratio_residual < 0.01);
    }

    #[test]
    fn too_few_crossings() {
        let tr = trace_of_partial(&[0.0, 2.0, 0.0]);
        assert!(matches!(
            period_estimate(&tr, 1.0),
            Err(CesaroError::InsufficientCrossings { found: 2, .. })
        ));
    }
}
