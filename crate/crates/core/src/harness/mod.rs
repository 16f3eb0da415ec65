//! Experiment plumbing: configuration, sample cache, CSV emission and the
//! verification driver.

pub mod cache;
pub mod config;
pub mod suite;

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::cesaro::{
    accumulate_elements, classify_growth_against, closest_approach, crossings, debounce_crossings,
    period_from_crossings, principal_minima, Approach, CesaroError, CesaroTrace, Crossing, GrowthClassification,
    PeriodEstimate, Verdict,
};
use crate::correlation::{CorrelationError, RhoScan};
use crate::oracles::{
    identity_rhs, lemma_oracle, Branch, FloorConvention, OracleError, Prediction, PredictionKind, SigmaRegime,
};
use crate::quadrature::{unit_elements, Kernel, QuadratureError};
use crate::zeta::ZetaError;

pub use cache::{cache_warm, CacheError, CacheGrid, CacheOrigin};
pub use config::{
    load_config, parse_config, suite_text, AsymptoteSource, ConfigError, ExperimentConfig, OracleRef, SlopeCheck,
    Tolerance,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Cesaro(#[from] CesaroError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentVerdict {
    Match,
    Mismatch,
    Exploratory,
}

impl fmt::Display for ExperimentVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Match => "Match",
            Self::Mismatch => "Mismatch",
            Self::Exploratory => "Exploratory",
        })
    }
}

/// Residual envelopes over `[3T/4, 7T/8)` and `[7T/8, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendCheck {
    pub third_quarter_max: f64,
    pub last_eighth_max: f64,
}

impl TrendCheck {
    pub fn of(trace: &CesaroTrace, target: f64) -> Self {
        let n = trace.len();
        let env = |range: std::ops::Range<usize>| {
            trace.means[range]
                .iter()
                .map(|m| (m - target).abs())
                .fold(0.0, f64::max)
        };
        Self {
            third_quarter_max: env(3 * n / 4..7 * n / 8),
            last_eighth_max: env(7 * n / 8..n),
        }
    }

    pub fn shrinking(&self) -> bool {
        self.last_eighth_max <= self.third_quarter_max
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub experiment_id: String,
    pub trace: CesaroTrace,
    pub classification: GrowthClassification,
    pub prediction: Prediction,
    pub verdict: ExperimentVerdict,
    /// Final Cesàro mean, or the fitted slope for divergent predictions.
    pub measured: f64,
    pub trend: Option<TrendCheck>,
    /// Why the verdict came out as it did.
    pub note: String,
}

fn branch_of(sigma: f64, r: f64) -> Branch {
    Branch {
        sigma_regime: SigmaRegime::of(sigma),
        r_relation: FloorConvention::default().relation(r),
    }
}

fn lemma_a(kernel: &Kernel) -> Option<f64> {
    match kernel {
        Kernel::SinKernel { a } | Kernel::CosKernel { a } => Some(*a),
        _ => None,
    }
}

/// The prediction an experiment is judged against.
pub fn resolve_prediction(cfg: &ExperimentConfig) -> Result<Prediction, HarnessError> {
    let (sigma, r) = (cfg.integrand.sigma, cfg.integrand.r);
    let with_kind = |kind| Prediction {
        kind,
        branch: branch_of(sigma, r),
    };
    Ok(match cfg.asymptote_source {
        AsymptoteSource::None => with_kind(PredictionKind::Indeterminate { candidate: None }),
        AsymptoteSource::Explicit(v) => with_kind(PredictionKind::Finite(v)),
        AsymptoteSource::Oracle => match cfg.oracle {
            Some(OracleRef::Identity(id)) => identity_rhs(id, sigma, r)?,
            Some(OracleRef::Lemma(kind)) => {
                let a = lemma_a(&cfg.integrand.kernel).ok_or_else(|| ConfigError::Invalid {
                    id: cfg.experiment_id.clone(),
                    detail: "lemma oracle without a lemma kernel".into(),
                })?;
                with_kind(PredictionKind::Finite(lemma_oracle(kind, a, sigma)?))
            }
            None => {
                return Err(ConfigError::Invalid {
                    id: cfg.experiment_id.clone(),
                    detail: "asymptote = oracle without an oracle".into(),
                }
                .into())
            }
        },
    })
}

/// Cesàro trace of the configured integrand over `[0, T_max]`.
pub fn compute_trace(cfg: &ExperimentConfig) -> Result<CesaroTrace, HarnessError> {
    cfg.validate()?;
    let elements = unit_elements(&cfg.integrand, 0.0, cfg.t_max, cfg.panel_tol)?;
    Ok(accumulate_elements(&elements, cfg.cesaro_order)?)
}

/// Runs one experiment and judges it against its prediction.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    let prediction = resolve_prediction(cfg)?;
    let trace = compute_trace(cfg)?;
    judge(cfg, trace, prediction)
}

/// Judges a precomputed trace.
pub fn judge(
    cfg: &ExperimentConfig,
    trace: CesaroTrace,
    prediction: Prediction,
) -> Result<ExperimentOutcome, HarnessError> {
    let asymptote = match prediction.kind {
        PredictionKind::Finite(v) => Some(v),
        PredictionKind::Indeterminate { candidate } => candidate,
        PredictionKind::Divergent(_) => None,
    };
    let classification = classify_growth_against(&trace, asymptote)?;
    let final_mean = trace.final_mean();
    let mut trend = None;

    let (verdict, measured, note) = match prediction.kind {
        PredictionKind::Indeterminate { .. } => (
            ExperimentVerdict::Exploratory,
            final_mean,
            format!("{:?}", classification.verdict),
        ),
        PredictionKind::Divergent(order) => {
            let slope = classification.slope;
            match classification.verdict {
                Verdict::LinearDivergence(_) if order == 1.0 => match cfg.slope_check {
                    Some(check) if (slope - check.slope).abs() > check.rel_tol * check.slope.abs() => (
                        ExperimentVerdict::Mismatch,
                        slope,
                        format!("slope {slope:.4} outside {} ± {}%", check.slope, check.rel_tol * 100.0),
                    ),
                    _ => (ExperimentVerdict::Match, slope, "linear divergence".into()),
                },
                other => (
                    ExperimentVerdict::Mismatch,
                    slope,
                    format!("expected divergence of order {order}, classified {other:?}"),
                ),
            }
        }
        PredictionKind::Finite(target) => {
            let allowed = cfg.tolerance.allowed(target);
            let off = (final_mean - target).abs();
            if let Verdict::LinearDivergence(s) = classification.verdict {
                (
                    ExperimentVerdict::Mismatch,
                    final_mean,
                    format!("finite prediction but linear divergence (slope {s:.3e})"),
                )
            } else if off > allowed {
                (
                    ExperimentVerdict::Mismatch,
                    final_mean,
                    format!("|mean − oracle| = {off:.4e} > {allowed:.4e}"),
                )
            } else if cfg.require_trend {
                let t = TrendCheck::of(&trace, target);
                trend = Some(t);
                if t.shrinking() {
                    (ExperimentVerdict::Match, final_mean, format!("within {allowed:.3e}, envelope shrinking"))
                } else {
                    (
                        ExperimentVerdict::Mismatch,
                        final_mean,
                        format!(
                            "residual envelope grew: {:.3e} → {:.3e}",
                            t.third_quarter_max, t.last_eighth_max
                        ),
                    )
                }
            } else {
                (ExperimentVerdict::Match, final_mean, format!("within {allowed:.3e}"))
            }
        }
    };
    Ok(ExperimentOutcome {
        experiment_id: cfg.experiment_id.clone(),
        trace,
        classification,
        prediction,
        verdict,
        measured,
        trend,
        note,
    })
}

/// Verdict column of the summary table; errors become rows too.
#[derive(Debug, Clone, PartialEq)]
pub enum RowVerdict {
    Verdict(ExperimentVerdict),
    Error(String),
}

impl fmt::Display for RowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowVerdict::Verdict(v) => write!(f, "{v}"),
            RowVerdict::Error(_) => f.write_str("Error"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub id: String,
    pub oracle: String,
    pub measured: String,
    pub tolerance: String,
    pub verdict: RowVerdict,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// No Mismatch and no Error rows.
    pub fn success(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(r.verdict, RowVerdict::Verdict(ExperimentVerdict::Match | ExperimentVerdict::Exploratory)))
    }

    pub fn count(&self, v: ExperimentVerdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == RowVerdict::Verdict(v)).count()
    }
}

impl fmt::Display for SummaryTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let headers = ["id", "oracle", "measured", "tolerance", "verdict", "note"];
        let cells: Vec<[String; 6]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.id.clone(),
                    r.oracle.clone(),
                    r.measured.clone(),
                    r.tolerance.clone(),
                    r.verdict.to_string(),
                    r.note.clone(),
                ]
            })
            .collect();
        let mut widths = headers.map(|h| h.chars().count());
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, cols: &[&str]| -> fmt::Result {
            for (i, (c, w)) in cols.iter().zip(widths).enumerate() {
                if i + 1 == cols.len() {
                    writeln!(f, "{c}")?;
                } else {
                    write!(f, "{c}{}  ", " ".repeat(w - c.chars().count()))?;
                }
            }
            Ok(())
        };
        line(f, &headers)?;
        for row in &cells {
            line(f, &row.iter().map(String::as_str).collect::<Vec<_>>())?;
        }
        write!(
            f,
            "{} match, {} mismatch, {} exploratory, {} error",
            self.count(ExperimentVerdict::Match),
            self.count(ExperimentVerdict::Mismatch),
            self.count(ExperimentVerdict::Exploratory),
            self.rows.iter().filter(|r| matches!(r.verdict, RowVerdict::Error(_))).count()
        )
    }
}

fn describe_prediction(p: &Prediction) -> String {
    match p.kind {
        PredictionKind::Finite(v) => format!("{v:.6}"),
        PredictionKind::Divergent(order) => format!("divergent T^{order}"),
        PredictionKind::Indeterminate { candidate: Some(c) } => format!("indeterminate ({c:.6}?)"),
        PredictionKind::Indeterminate { candidate: None } => "indeterminate".into(),
    }
}

/// One summary row for a finished (or failed) experiment.
pub fn summary_row(cfg: &ExperimentConfig, result: &Result<ExperimentOutcome, HarnessError>) -> SummaryRow {
    let tolerance = match result.as_ref().map(|o| o.prediction.kind) {
        Ok(PredictionKind::Indeterminate { .. }) => "-".to_string(),
        Ok(PredictionKind::Divergent(_)) => match cfg.slope_check {
            Some(c) => format!("slope {} ± {}%", c.slope, c.rel_tol * 100.0),
            None => "linear".into(),
        },
        _ => cfg.tolerance.to_string(),
    };
    match result {
        Ok(o) => SummaryRow {
            id: cfg.experiment_id.clone(),
            oracle: describe_prediction(&o.prediction),
            measured: match o.prediction.kind {
                PredictionKind::Divergent(_) => format!("slope {:.4}", o.measured),
                _ => format!("{:.6}", o.measured),
            },
            tolerance,
            verdict: RowVerdict::Verdict(o.verdict),
            note: o.note.clone(),
        },
        Err(e) => SummaryRow {
            id: cfg.experiment_id.clone(),
            oracle: "-".into(),
            measured: "-".into(),
            tolerance,
            verdict: RowVerdict::Error(e.to_string()),
            note: e.to_string(),
        },
    }
}

/// Runs every experiment in order; failures become rows.
pub fn verify_all(suite: &[ExperimentConfig]) -> SummaryTable {
    verify_with(suite, |_, _| {})
}

/// As [`verify_all`], calling `progress` after each experiment.
pub fn verify_with<P>(suite: &[ExperimentConfig], mut progress: P) -> SummaryTable
where
    P: FnMut(&ExperimentConfig, &Result<ExperimentOutcome, HarnessError>),
{
    let rows = suite
        .iter()
        .map(|cfg| {
            let result = run_experiment(cfg);
            progress(cfg, &result);
            summary_row(cfg, &result)
        })
        .collect();
    SummaryTable { rows }
}

/// `t,element,partial_sum,cesaro_mean`, one row per unit index.
pub fn write_trace_csv<W: Write>(trace: &CesaroTrace, mut w: W) -> io::Result<()> {
    writeln!(w, "t,element,partial_sum,cesaro_mean")?;
    for m in 0..trace.len() {
        writeln!(
            w,
            "{},{},{},{}",
            trace.t_grid[m], trace.elements[m], trace.partial[m], trace.means[m]
        )?;
    }
    w.flush()
}

/// `rho,cor,cov,var_f,var_g,e_f,e_g`; failed grid points are written as NaN.
pub fn write_scan_csv<W: Write>(scan: &RhoScan, mut w: W) -> io::Result<()> {
    writeln!(w, "rho,cor,cov,var_f,var_g,e_f,e_g")?;
    for (rho, result) in scan.rhos.iter().zip(&scan.results) {
        match result {
            Ok(r) => writeln!(
                w,
                "{},{},{},{},{},{},{}",
                rho, r.cor, r.cov, r.var_f, r.var_g, r.e_f, r.e_g
            )?,
            Err(_) => writeln!(w, "{rho},NaN,NaN,NaN,NaN,NaN,NaN")?,
        }
    }
    w.flush()
}

/// Crossing, closest-approach and period analysis of a trace.
#[derive(Debug, Clone)]
pub struct PeriodicityReport {
    pub asymptote: f64,
    /// `2π/|ln r|`, the period of the `r^{it}` factor.
    pub rho: f64,
    pub crossings: Vec<Crossing>,
    /// Crossings merged within `rho` of each other.
    pub debounced: Vec<Crossing>,
    pub approaches: Vec<Approach>,
    pub principal_minima: Vec<Approach>,
    pub period: Result<PeriodEstimate, CesaroError>,
}

/// Minimum relative prominence for a principal minimum.
pub const PRINCIPAL_PROMINENCE: f64 = 0.5;

pub fn periodicity_report(trace: &CesaroTrace, asymptote: f64, r: f64) -> PeriodicityReport {
    let rho = 2.0 * std::f64::consts::PI / r.ln().abs();
    let all = crossings(trace, asymptote);
    let debounced = if rho.is_finite() { debounce_crossings(&all, rho) } else { all.clone() };
    PeriodicityReport {
        asymptote,
        rho,
        period: period_from_crossings(debounced.clone()),
        crossings: all,
        debounced,
        approaches: closest_approach(trace, asymptote),
        principal_minima: principal_minima(trace, asymptote, PRINCIPAL_PROMINENCE),
    }
}

impl fmt::Display for PeriodicityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "asymptote {:.6}", self.asymptote)?;
        writeln!(f, "rho = 2π/|ln r| = {:.4}", self.rho)?;
        writeln!(
            f,
            "crossings: {} raw, {} after merging within rho",
            self.crossings.len(),
            self.debounced.len()
        )?;
        for c in &self.debounced {
            writeln!(f, "  t = {:10.3}  {}", c.t, if c.rising { "rising" } else { "falling" })?;
        }
        match &self.period {
            Ok(p) => {
                writeln!(
                    f,
                    "period {:.3} = {:.3} rho, drift {:.4} per crossing, max ratio residual {:.3}",
                    p.period,
                    p.period / self.rho,
                    p.phase_drift,
                    p.max_ratio_residual
                )?;
            }
            Err(e) => writeln!(f, "period: {e}")?,
        }
        writeln!(f, "principal closest approaches:")?;
        for a in &self.principal_minima {
            writeln!(f, "  t = {:10.3}  distance {:+.5}", a.t, a.distance)?;
        }
        Ok(())
    }
}
