//! Plain-text experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! [experiment sighalf-2.1]
//! oracle = sighalf
//! kernel = plain_moment
//! sigma = 0.5
//! r = 2.1
//! t_max = 2000
//! tol_rel = 0.02
//! ```
//!
//! A difference integrand is written `kernel = derivative_over_s - inverse_square`.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::oracles::{IdentityId, LemmaKind};
use crate::quadrature::{Component, Domain, IntegrandSpec, Kernel, DEFAULT_PANEL_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {detail}")]
    Syntax { line: usize, detail: String },
    #[error("experiment `{id}`: {detail}")]
    Invalid { id: String, detail: String },
    #[error("duplicate experiment id `{0}`")]
    DuplicateId(String),
    #[error("{0}")]
    Io(String),
}

/// Closed form an experiment is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleRef {
    Identity(IdentityId),
    /// Lemma integral at the kernel's `a` and the experiment's σ.
    Lemma(LemmaKind),
}

impl fmt::Display for OracleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleRef::Identity(id) => write!(f, "{id}"),
            OracleRef::Lemma(LemmaKind::SinKernel) => f.write_str("lemma_sin"),
            OracleRef::Lemma(LemmaKind::CosKernel) => f.write_str("lemma_cos"),
            OracleRef::Lemma(LemmaKind::J2s) => f.write_str("lemma_j2s"),
            OracleRef::Lemma(LemmaKind::G2) => f.write_str("lemma_g2"),
        }
    }
}

impl FromStr for OracleRef {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "lemma_sin" => OracleRef::Lemma(LemmaKind::SinKernel),
            "lemma_cos" => OracleRef::Lemma(LemmaKind::CosKernel),
            "lemma_j2s" => OracleRef::Lemma(LemmaKind::J2s),
            "lemma_g2" => OracleRef::Lemma(LemmaKind::G2),
            other => OracleRef::Identity(other.parse().map_err(|e| format!("{e}"))?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoteSource {
    Oracle,
    Explicit(f64),
    None,
}

/// How close the measurement must come to a finite prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

/// Allowance for a relative tolerance when the target is exactly zero,
/// matching the zero-asymptote spread floor of the growth classifier.
pub const ZERO_TARGET_ALLOWANCE: f64 = 0.05;

impl Tolerance {
    pub fn allowed(&self, target: f64) -> f64 {
        match *self {
            Tolerance::Relative(_) if target == 0.0 => ZERO_TARGET_ALLOWANCE,
            Tolerance::Relative(f) => f * target.abs(),
            Tolerance::Absolute(a) => a,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Relative(x) => write!(f, "{}%", x * 100.0),
            Tolerance::Absolute(x) => write!(f, "±{x:.4}"),
        }
    }
}

/// Expected slope of a divergent trace's means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeCheck {
    pub slope: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub oracle: Option<OracleRef>,
    pub integrand: IntegrandSpec,
    pub t_max: f64,
    pub asymptote_source: AsymptoteSource,
    pub cesaro_order: u32,
    pub panel_tol: f64,
    pub tolerance: Tolerance,
    pub slope_check: Option<SlopeCheck>,
    /// Also require the residual envelope to shrink over the last quarter.
    pub require_trend: bool,
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn new(id: impl Into<String>, integrand: IntegrandSpec, t_max: f64) -> Self {
        Self {
            experiment_id: id.into(),
            oracle: None,
            integrand,
            t_max,
            asymptote_source: AsymptoteSource::Oracle,
            cesaro_order: 1,
            panel_tol: DEFAULT_PANEL_TOL,
            tolerance: Tolerance::Relative(0.02),
            slope_check: None,
            require_trend: false,
            output_path: None,
        }
    }

    pub fn oracle(mut self, oracle: OracleRef) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn identity(self, id: IdentityId) -> Self {
        self.oracle(OracleRef::Identity(id))
    }

    pub fn asymptote(mut self, source: AsymptoteSource) -> Self {
        self.asymptote_source = source;
        self
    }

    pub fn tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn slope(mut self, slope: f64, rel_tol: f64) -> Self {
        self.slope_check = Some(SlopeCheck { slope, rel_tol });
        self
    }

    pub fn trend(mut self) -> Self {
        self.require_trend = true;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |detail: String| {
            Err(ConfigError::Invalid {
                id: self.experiment_id.clone(),
                detail,
            })
        };
        if self.experiment_id.trim().is_empty() {
            return bad("experiment id must be nonempty".into());
        }
        if !(self.t_max >= 1.0) || !self.t_max.is_finite() {
            return bad(format!("t_max must be at least 1, got {}", self.t_max));
        }
        if self.cesaro_order == 0 {
            return bad("cesaro_order must be positive".into());
        }
        if !(self.panel_tol > 0.0) {
            return bad(format!("panel_tol must be positive, got {}", self.panel_tol));
        }
        if self.asymptote_source == AsymptoteSource::Oracle && self.oracle.is_none() {
            return bad("asymptote = oracle needs an `oracle` key".into());
        }
        if let Some(OracleRef::Lemma(_)) = self.oracle {
            if !matches!(self.integrand.kernel, Kernel::SinKernel { .. } | Kernel::CosKernel { .. }) {
                return bad("lemma oracles need a sin_kernel or cos_kernel integrand".into());
            }
        }
        self.integrand
            .validate(0.0, self.t_max)
            .or_else(|e| bad(e.to_string()))
    }

    /// Serialises back to the config format; parsing the result yields an
    /// equal value.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let spec = &self.integrand;
        let _ = writeln!(s, "[experiment {}]", self.experiment_id);
        if let Some(o) = self.oracle {
            let _ = writeln!(s, "oracle = {o}");
        }
        let _ = writeln!(s, "kernel = {}", kernel_text(&spec.kernel));
        if let Some(m) = kernel_m(&spec.kernel) {
            let _ = writeln!(s, "m = {m}");
        }
        if let Some(a) = kernel_a(&spec.kernel) {
            let _ = writeln!(s, "a = {a}");
        }
        let _ = writeln!(s, "sigma = {}", spec.sigma);
        let _ = writeln!(s, "r = {}", spec.r);
        if spec.component != Component::Real {
            let _ = writeln!(s, "component = {}", component_text(spec.component));
        }
        if spec.domain != Domain::HalfLine {
            let _ = writeln!(s, "domain = symmetric");
        }
        if spec.weight != 1.0 {
            let _ = writeln!(s, "weight = {}", spec.weight);
        }
        let _ = writeln!(s, "t_max = {}", self.t_max);
        match self.asymptote_source {
            AsymptoteSource::Oracle => {}
            AsymptoteSource::None => {
                let _ = writeln!(s, "asymptote = none");
            }
            AsymptoteSource::Explicit(v) => {
                let _ = writeln!(s, "asymptote = {v}");
            }
        }
        if self.cesaro_order != 1 {
            let _ = writeln!(s, "cesaro_order = {}", self.cesaro_order);
        }
        if self.panel_tol != DEFAULT_PANEL_TOL {
            let _ = writeln!(s, "panel_tol = {:e}", self.panel_tol);
        }
        match self.tolerance {
            Tolerance::Relative(x) => {
                let _ = writeln!(s, "tol_rel = {x}");
            }
            Tolerance::Absolute(x) => {
                let _ = writeln!(s, "tol_abs = {x}");
            }
        }
        if let Some(c) = self.slope_check {
            let _ = writeln!(s, "expect_slope = {}", c.slope);
            let _ = writeln!(s, "slope_tol_rel = {}", c.rel_tol);
        }
        if self.require_trend {
            let _ = writeln!(s, "trend = true");
        }
        if let Some(p) = &self.output_path {
            let _ = writeln!(s, "output = {p}");
        }
        s
    }
}

fn kernel_name(k: &Kernel) -> &'static str {
    match k {
        Kernel::MomentOverS => "moment_over_s",
        Kernel::PlainMoment { .. } => "plain_moment",
        Kernel::InverseSquare => "inverse_square",
        Kernel::DerivativeOverS => "derivative_over_s",
        Kernel::MasterF => "master_f",
        Kernel::SinKernel { .. } => "sin_kernel",
        Kernel::CosKernel { .. } => "cos_kernel",
        Kernel::Difference { .. } => "difference",
    }
}

fn kernel_text(k: &Kernel) -> String {
    match k {
        Kernel::Difference { lhs, rhs } => format!("{} - {}", kernel_name(lhs), kernel_name(rhs)),
        other => kernel_name(other).to_string(),
    }
}

fn kernel_m(k: &Kernel) -> Option<u32> {
    match k {
        Kernel::PlainMoment { m } => Some(*m),
        Kernel::Difference { lhs, rhs } => kernel_m(lhs).or(kernel_m(rhs)),
        _ => None,
    }
}

fn kernel_a(k: &Kernel) -> Option<f64> {
    match k {
        Kernel::SinKernel { a } | Kernel::CosKernel { a } => Some(*a),
        Kernel::Difference { lhs, rhs } => kernel_a(lhs).or(kernel_a(rhs)),
        _ => None,
    }
}

fn component_text(c: Component) -> &'static str {
    match c {
        Component::Real => "real",
        Component::Imag => "imag",
        Component::Full => "full",
    }
}

fn parse_kernel(text: &str, m: u32, a: Option<f64>) -> Result<Kernel, String> {
    let single = |name: &str| -> Result<Kernel, String> {
        let need_a = || a.ok_or_else(|| format!("kernel `{name}` needs an `a` key"));
        Ok(match name.trim() {
            "moment_over_s" => Kernel::MomentOverS,
            "plain_moment" => Kernel::PlainMoment { m },
            "inverse_square" => Kernel::InverseSquare,
            "derivative_over_s" => Kernel::DerivativeOverS,
            "master_f" => Kernel::MasterF,
            "sin_kernel" => Kernel::SinKernel { a: need_a()? },
            "cos_kernel" => Kernel::CosKernel { a: need_a()? },
            other => return Err(format!("unknown kernel `{other}`")),
        })
    };
    match text.split_once(" - ") {
        Some((l, r)) => Ok(Kernel::difference(single(l)?, single(r)?)),
        None => single(text),
    }
}

/// A decimal or a `p/q` fraction.
fn parse_real(value: &str) -> Result<f64, String> {
    let v = value.trim();
    let parsed = match v.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
            let q: f64 = q.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
            p / q
        }
        None => v.parse().map_err(|e| format!("`{v}`: {e}"))?,
    };
    if parsed.is_finite() {
        Ok(parsed)
    } else {
        Err(format!("`{v}` is not a finite number"))
    }
}

#[derive(Default)]
struct Section {
    id: String,
    line: usize,
    pairs: Vec<(usize, String, String)>,
}

fn build(section: Section) -> Result<ExperimentConfig, ConfigError> {
    let id = section.id.clone();
    let err = |line: usize, detail: String| ConfigError::Syntax {
        line,
        detail: format!("[{id}] {detail}"),
    };
    let get = |key: &str| section.pairs.iter().rev().find(|(_, k, _)| k == key);
    let real = |key: &str| -> Result<Option<f64>, ConfigError> {
        get(key)
            .map(|(line, _, v)| parse_real(v).map_err(|d| err(*line, format!("{key}: {d}"))))
            .transpose()
    };
    let required = |key: &str| -> Result<f64, ConfigError> {
        real(key)?.ok_or_else(|| err(section.line, format!("missing `{key}`")))
    };

    let known = [
        "oracle", "kernel", "m", "a", "sigma", "r", "component", "domain", "weight", "t_max", "asymptote",
        "cesaro_order", "panel_tol", "tol_rel", "tol_abs", "expect_slope", "slope_tol_rel", "trend", "output",
    ];
    for (line, key, _) in &section.pairs {
        if !known.contains(&key.as_str()) {
            return Err(err(*line, format!("unknown key `{key}`")));
        }
    }

    let m = match get("m") {
        Some((line, _, v)) => v.parse::<u32>().map_err(|e| err(*line, format!("m: {e}")))?,
        None => 0,
    };
    let (kline, _, ktext) = get("kernel").ok_or_else(|| err(section.line, "missing `kernel`".into()))?;
    let kernel = parse_kernel(ktext, m, real("a")?).map_err(|d| err(*kline, d))?;

    let mut spec = IntegrandSpec::new(kernel, required("sigma")?, real("r")?.unwrap_or(1.0));
    if let Some((line, _, v)) = get("component") {
        spec.component = match v.as_str() {
            "real" => Component::Real,
            "imag" => Component::Imag,
            other => return Err(err(*line, format!("component must be real or imag, got `{other}`"))),
        };
    }
    if let Some((line, _, v)) = get("domain") {
        spec.domain = match v.as_str() {
            "half_line" => Domain::HalfLine,
            "symmetric" => Domain::Symmetric,
            other => return Err(err(*line, format!("domain must be half_line or symmetric, got `{other}`"))),
        };
    }
    if let Some(w) = real("weight")? {
        spec.weight = w;
    }

    let mut cfg = ExperimentConfig::new(id.clone(), spec, required("t_max")?);
    if let Some((line, _, v)) = get("oracle") {
        cfg.oracle = Some(v.parse().map_err(|d| err(*line, d))?);
    }
    if let Some((line, _, v)) = get("asymptote") {
        cfg.asymptote_source = match v.as_str() {
            "oracle" => AsymptoteSource::Oracle,
            "none" => AsymptoteSource::None,
            other => AsymptoteSource::Explicit(parse_real(other).map_err(|d| err(*line, d))?),
        };
    }
    if let Some((line, _, v)) = get("cesaro_order") {
        cfg.cesaro_order = v.parse().map_err(|e| err(*line, format!("cesaro_order: {e}")))?;
    }
    if let Some(t) = real("panel_tol")? {
        cfg.panel_tol = t;
    }
    match (real("tol_rel")?, real("tol_abs")?) {
        (Some(_), Some(_)) => return Err(err(section.line, "give tol_rel or tol_abs, not both".into())),
        (Some(x), None) => cfg.tolerance = Tolerance::Relative(x),
        (None, Some(x)) => cfg.tolerance = Tolerance::Absolute(x),
        (None, None) => {}
    }
    if let Some(slope) = real("expect_slope")? {
        cfg.slope_check = Some(SlopeCheck {
            slope,
            rel_tol: real("slope_tol_rel")?.unwrap_or(0.1),
        });
    }
    if let Some((line, _, v)) = get("trend") {
        cfg.require_trend = v.parse().map_err(|e| err(*line, format!("trend: {e}")))?;
    }
    cfg.output_path = get("output").map(|(_, _, v)| v.clone());
    cfg.validate()?;
    Ok(cfg)
}

/// Parses every `[experiment <id>]` section of `text`.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let inner = header
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    detail: "unterminated section header".into(),
                })?
                .trim();
            let id = inner
                .strip_prefix("experiment")
                .filter(|rest| rest.starts_with(char::is_whitespace))
                .map(str::trim)
                .filter(|id| !id.is_empty())
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    detail: format!("expected `[experiment <id>]`, got `[{inner}]`"),
                })?;
            sections.push(Section {
                id: id.to_string(),
                line,
                pairs: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            detail: format!("expected `key = value`, got `{content}`"),
        })?;
        let section = sections.last_mut().ok_or_else(|| ConfigError::Syntax {
            line,
            detail: "key outside an [experiment] section".into(),
        })?;
        section.pairs.push((line, key.trim().to_string(), value.trim().to_string()));
    }

    let mut seen = HashSet::new();
    for s in &sections {
        if !seen.insert(s.id.clone()) {
            return Err(ConfigError::DuplicateId(s.id.clone()));
        }
    }
    sections.into_iter().map(build).collect()
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentConfig>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Config text for a whole suite.
pub fn suite_text(suite: &[ExperimentConfig]) -> String {
    suite.iter().map(|c| c.to_config_text()).collect::<Vec<_>>().join("\n")
}
