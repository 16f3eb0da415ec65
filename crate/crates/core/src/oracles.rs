//! Closed-form right-hand sides with explicit branch logic.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("no closed form at σ = {0} (boundary value)")]
    UnsupportedSigma(f64),
    #[error("{0}")]
    DomainError(String),
    #[error("{id} does not hold at σ = {sigma}, r = {r}: {reason}")]
    RegimeViolation {
        id: IdentityId,
        sigma: f64,
        r: f64,
        reason: &'static str,
    },
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SigmaRegime {
    Gt1,
    Eq1,
    /// `0 < σ < 1` (σ = 0 is folded in only where an identity allows it).
    Strip01,
    Lt0,
}

impl SigmaRegime {
    /// `None` at σ = 0, which no branch covers.
    pub fn of(sigma: f64) -> Option<Self> {
        if sigma > 1.0 {
            Some(Self::Gt1)
        } else if sigma == 1.0 {
            Some(Self::Eq1)
        } else if sigma > 0.0 {
            Some(Self::Strip01)
        } else if sigma < 0.0 {
            Some(Self::Lt0)
        } else {
            None
        }
    }
}

/// Position of `r` relative to its nearest integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RRelation {
    BelowInteger,
    AtInteger,
    AboveInteger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub sigma_regime: Option<SigmaRegime>,
    pub r_relation: RRelation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictionKind {
    Finite(f64),
    /// Grows like `T^order`.
    Divergent(f64),
    /// No reliable value; `candidate` is one admissible regularisation.
    Indeterminate { candidate: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub kind: PredictionKind,
    pub branch: Branch,
}

impl Prediction {
    fn new(kind: PredictionKind, sigma: f64, r: f64, floor: &FloorConvention) -> Self {
        Self {
            kind,
            branch: Branch {
                sigma_regime: SigmaRegime::of(sigma),
                r_relation: floor.relation(r),
            },
        }
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self.kind {
            PredictionKind::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// Snap radius that decides when `r` counts as an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorConvention {
    pub epsilon_integer: f64,
}

impl Default for FloorConvention {
    fn default() -> Self {
        Self { epsilon_integer: 1e-9 }
    }
}

impl FloorConvention {
    pub fn is_integer(&self, r: f64) -> bool {
        (r - r.round()).abs() < self.epsilon_integer
    }

    pub fn relation(&self, r: f64) -> RRelation {
        if self.is_integer(r) {
            RRelation::AtInteger
        } else if r < r.round() {
            RRelation::BelowInteger
        } else {
            RRelation::AboveInteger
        }
    }

    /// Open floor: the greatest integer strictly below `r`; meaningful only
    /// off the integers.
    pub fn floor(&self, r: f64) -> f64 {
        r.floor()
    }

    /// The integer `r` snaps to, if any.
    pub fn integer(&self, r: f64) -> Option<f64> {
        self.is_integer(r).then(|| r.round())
    }
}

fn check_r(r: f64) -> Result<(), OracleError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(OracleError::DomainError(format!("r must be positive and finite, got {r}")))
    }
}

/// `Z(σ, r) = ∫ ζ(s) r^s / s dt` over the full line.
pub fn z_oracle(sigma: f64, r: f64) -> Result<Prediction, OracleError> {
    z_oracle_with(sigma, r, &FloorConvention::default())
}

pub fn z_oracle_with(sigma: f64, r: f64, floor: &FloorConvention) -> Result<Prediction, OracleError> {
    check_r(r)?;
    let regime = SigmaRegime::of(sigma).ok_or(OracleError::UnsupportedSigma(sigma))?;
    let value = match (regime, floor.integer(r)) {
        (SigmaRegime::Eq1, _) => return Err(OracleError::UnsupportedSigma(sigma)),
        (SigmaRegime::Gt1, None) => 2.0 * PI * floor.floor(r),
        (SigmaRegime::Gt1, Some(n)) => PI * (2.0 * n - 1.0),
        (SigmaRegime::Strip01, None) => sawtooth_with(r, floor),
        (SigmaRegime::Strip01, Some(_)) => -PI,
        (SigmaRegime::Lt0, None) => sawtooth_with(r, floor) + PI,
        (SigmaRegime::Lt0, Some(_)) => 0.0,
    };
    Ok(Prediction::new(PredictionKind::Finite(value), sigma, r, floor))
}

/// `Z'(σ, r)·r = ∫ ζ(s) r^s dt` over the full line.
pub fn zprime_oracle(sigma: f64, r: f64) -> Result<Prediction, OracleError> {
    zprime_oracle_with(sigma, r, &FloorConvention::default())
}

pub fn zprime_oracle_with(sigma: f64, r: f64, floor: &FloorConvention) -> Result<Prediction, OracleError> {
    check_r(r)?;
    let kind = if floor.is_integer(r) {
        PredictionKind::Divergent(1.0)
    } else if sigma > 1.0 {
        PredictionKind::Finite(0.0)
    } else if sigma == 1.0 {
        PredictionKind::Finite(-PI * r)
    } else {
        PredictionKind::Finite(-2.0 * PI * r)
    };
    Ok(Prediction::new(kind, sigma, r, floor))
}

/// Half-line form `∫_0^∞ Re(ζ(s) r^s) dt`: half of [`zprime_oracle`].
pub fn zprime_half_line(sigma: f64, r: f64) -> Result<Prediction, OracleError> {
    let mut p = zprime_oracle(sigma, r)?;
    if let PredictionKind::Finite(v) = p.kind {
        p.kind = PredictionKind::Finite(0.5 * v);
    }
    Ok(p)
}

/// `A(r) = 2π(⌊r⌋ − r)`, `−π` at the integers.
pub fn sawtooth(r: f64) -> f64 {
    sawtooth_with(r, &FloorConvention::default())
}

pub fn sawtooth_with(r: f64, floor: &FloorConvention) -> f64 {
    if floor.is_integer(r) {
        -PI
    } else {
        // r − ⌊r⌋ is exact in binary floating point
        -2.0 * PI * (r - floor.floor(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaKind {
    /// `∫ t sin(a t)/(σ² + t²) dt`
    SinKernel,
    /// `∫ cos(a t)/(σ² + t²) dt`
    CosKernel,
    /// `∫ t sin(t ln q)/(σ² + t²) dt` with `q = j/r`.
    J2s,
    /// `∫ cos(t ln q)/(σ² + t²) dt` with `q = j/r`.
    G2,
}

/// Full-line closed forms of the lemma integrals.
pub fn lemma_oracle(kind: LemmaKind, a_or_ratio: f64, sigma: f64) -> Result<f64, OracleError> {
    if !(sigma > 0.0) {
        return Err(OracleError::DomainError(format!("σ must be positive, got {sigma}")));
    }
    let x = a_or_ratio;
    match kind {
        LemmaKind::SinKernel | LemmaKind::CosKernel if !(x > 0.0) => {
            Err(OracleError::DomainError(format!("a must be positive, got {x}")))
        }
        LemmaKind::SinKernel => Ok(PI * (-x * sigma).exp()),
        LemmaKind::CosKernel => Ok(PI / sigma * (-x * sigma).exp()),
        LemmaKind::J2s | LemmaKind::G2 if !(x > 0.0) => {
            Err(OracleError::DomainError(format!("ratio must be positive, got {x}")))
        }
        LemmaKind::J2s => Ok(if x > 1.0 {
            PI * x.powf(-sigma)
        } else if x < 1.0 {
            -PI * x.powf(sigma)
        } else {
            0.0
        }),
        LemmaKind::G2 => Ok(PI / sigma * x.min(1.0 / x).powf(sigma)),
    }
}

/// The identities with closed-form right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    /// `Z(σ, r)`, the staircase / sawtooth family.
    Zdef,
    /// `∫ ζ r^s dt` (full line).
    Zprime,
    /// `∫_0^∞ Re(ζ(4+it) r^{4+it}) dt`, any σ > 1.
    Sig4,
    /// `∫_0^∞ Re(ζ(σ+it) r^{σ+it}) dt`, σ ≤ 1.
    Sighalf,
    /// `∫ ζ' r^s/s − ∫ ζ r^s/s²` at σ > 1: the constant `−Z(σ,r) ln r`.
    Jd1,
    /// As `Jd1` at integer `r = n`: `−π(2n−1) ln n`.
    Jdn,
    /// `∫ ζ'/s − ∫ ζ/s²` at σ > 1: zero.
    Jdn1,
    /// `∫ ζ'/s − ∫ ζ/s²` at any admissible σ: zero.
    Jdn2,
    /// `∫ ζ' r^s = 0`, σ > 1, r ≠ n.
    JdaX,
    /// `∫ ζ^{(m)} r^s = 0`, σ > 1, r ≠ n.
    JdaY,
    /// `(1/r) ∫ ζ r^s = 0`, σ > 1, r ≠ n.
    Jtd,
    /// `∫ ζ' r^s = 2π r ln r`, σ < 1, r ≠ n.
    Rneqn2d,
    /// `∫ ζ r^s`: `−2πr` (σ < 1), `−πr` (σ = 1), r ≠ n.
    Rneqnd,
    /// `∫ ζ' n^s/s − ∫ ζ n^s/s² = π ln n`, 0 < σ < 1.
    Reqn2d,
    /// As `Reqn2d` for σ < 0: zero.
    Reqn3d,
    /// `∫ F(t) dt = −2πr`.
    Ans,
    /// `∫ ζ(1/2+it) 2^{it}/(1/2+it) dt = −π/√2`.
    Tint,
    /// `∫ ζ(3/2−it) 2^{−it}/(3/2−it) dt = 3π√2/4`.
    Tint2A,
    /// `∫ ζ(1/2+it) r^{it} dt = −2π√r`, r ≠ n.
    Q3,
    /// `∫_0^∞ Re(ζ(1/2+it) r^{it}) dt = −π√r`, r ≠ n.
    Q3a,
    /// `∫_0^∞ (ζ_I sin(v ln r) − ζ_R cos(v ln r)) dv = π√r`.
    Dr,
    /// `∫_0^∞ ζ_R(1/2+it) dt`, candidate `−π`.
    Zr,
    /// The aberrant staircase `{2π⌊r⌋, 2πn, 0}`.
    Case123,
}

impl IdentityId {
    pub const ALL: [IdentityId; 23] = [
        Self::Zdef,
        Self::Zprime,
        Self::Sig4,
        Self::Sighalf,
        Self::Jd1,
        Self::Jdn,
        Self::Jdn1,
        Self::Jdn2,
        Self::JdaX,
        Self::JdaY,
        Self::Jtd,
        Self::Rneqn2d,
        Self::Rneqnd,
        Self::Reqn2d,
        Self::Reqn3d,
        Self::Ans,
        Self::Tint,
        Self::Tint2A,
        Self::Q3,
        Self::Q3a,
        Self::Dr,
        Self::Zr,
        Self::Case123,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Zdef => "zdef",
            Self::Zprime => "zprime",
            Self::Sig4 => "sig4",
            Self::Sighalf => "sighalf",
            Self::Jd1 => "jd1",
            Self::Jdn => "jdn",
            Self::Jdn1 => "jdn1",
            Self::Jdn2 => "jdn2",
            Self::JdaX => "jdax",
            Self::JdaY => "jday",
            Self::Jtd => "jtd",
            Self::Rneqn2d => "rneqn2d",
            Self::Rneqnd => "rneqnd",
            Self::Reqn2d => "reqn2d",
            Self::Reqn3d => "reqn3d",
            Self::Ans => "ans",
            Self::Tint => "tint",
            Self::Tint2A => "tint2a",
            Self::Q3 => "q3",
            Self::Q3a => "q3a",
            Self::Dr => "dr",
            Self::Zr => "zr",
            Self::Case123 => "case123",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.name() == key)
            .ok_or_else(|| OracleError::UnknownIdentity(s.to_string()))
    }
}

/// Right-hand side of identity `id` at `(σ, r)`.
pub fn identity_rhs(id: IdentityId, sigma: f64, r: f64) -> Result<Prediction, OracleError> {
    let floor = FloorConvention::default();
    check_r(r)?;
    let violation = |reason| OracleError::RegimeViolation { id, sigma, r, reason };
    let finite = |v: f64| Ok(Prediction::new(PredictionKind::Finite(v), sigma, r, &floor));
    let at_int = floor.integer(r);
    match id {
        IdentityId::Zdef => z_oracle_with(sigma, r, &floor),
        IdentityId::Zprime | IdentityId::Rneqnd => {
            if id == IdentityId::Rneqnd && sigma > 1.0 {
                return Err(violation("requires σ ≤ 1"));
            }
            zprime_oracle_with(sigma, r, &floor)
        }
        IdentityId::Sig4 | IdentityId::Jtd => {
            if !(sigma > 1.0) {
                return Err(violation("requires σ > 1"));
            }
            zprime_half_line(sigma, r)
        }
        IdentityId::Sighalf => {
            if !(sigma > 0.0 && sigma <= 1.0) {
                return Err(violation("requires 0 < σ ≤ 1"));
            }
            zprime_half_line(sigma, r)
        }
        IdentityId::Jd1 => {
            if !(sigma > 1.0) {
                return Err(violation("requires σ > 1"));
            }
            let z = z_oracle_with(sigma, r, &floor)?.finite_value().expect("σ > 1 is finite");
            finite(-z * r.ln())
        }
        IdentityId::Jdn => {
            if !(sigma > 1.0) {
                return Err(violation("requires σ > 1"));
            }
            let n = at_int.ok_or_else(|| violation("requires integer r"))?;
            finite(-PI * (2.0 * n - 1.0) * n.ln())
        }
        IdentityId::Jdn1 => {
            if !(sigma > 1.0) {
                return Err(violation("requires σ > 1"));
            }
            finite(0.0)
        }
        IdentityId::Jdn2 => {
            if sigma == 0.0 || sigma == 1.0 {
                return Err(violation("the integrands are singular at t = 0 for σ ∈ {0, 1}"));
            }
            finite(0.0)
        }
        IdentityId::JdaX | IdentityId::JdaY => {
            if !(sigma > 1.0) {
                return Err(violation("requires σ > 1"));
            }
            if at_int.is_some() {
                return Err(violation("requires non-integer r"));
            }
            finite(0.0)
        }
        IdentityId::Rneqn2d => {
            if !(sigma < 1.0) {
                return Err(violation("requires σ < 1"));
            }
            if at_int.is_some() {
                return Err(violation("requires non-integer r"));
            }
            finite(2.0 * PI * r * r.ln())
        }
        IdentityId::Reqn2d | IdentityId::Reqn3d => {
            let n = at_int.ok_or_else(|| violation("requires integer r"))?;
            match (id, SigmaRegime::of(sigma)) {
                (IdentityId::Reqn2d, Some(SigmaRegime::Strip01)) => finite(PI * n.ln()),
                (IdentityId::Reqn3d, Some(SigmaRegime::Lt0)) => finite(0.0),
                (IdentityId::Reqn2d, _) => Err(violation("requires 0 < σ < 1")),
                _ => Err(violation("requires σ < 0")),
            }
        }
        IdentityId::Ans => finite(-2.0 * PI * r),
        IdentityId::Tint => finite(-PI / SQRT_2),
        IdentityId::Tint2A => finite(3.0 * PI * SQRT_2 / 4.0),
        IdentityId::Q3 | IdentityId::Q3a => {
            if at_int.is_some() {
                return Err(violation("requires non-integer r"));
            }
            let scale = if id == IdentityId::Q3 { 2.0 } else { 1.0 };
            finite(-scale * PI * r.sqrt())
        }
        IdentityId::Dr => finite(PI * r.sqrt()),
        IdentityId::Zr => Ok(Prediction::new(
            PredictionKind::Indeterminate { candidate: Some(-PI) },
            sigma,
            r,
            &floor,
        )),
        IdentityId::Case123 => finite(match at_int {
            Some(n) => 2.0 * PI * n,
            None if r > 1.0 => 2.0 * PI * floor.floor(r),
            None => 0.0,
        }),
    }
}
