use num_complex::Complex64;

use super::{node_budget, QuadratureError};
use crate::zeta::{self, ZetaError, HEIGHT_MAX, SIGMA_MAX, SIGMA_MIN};

/// Integrand families over the line `s = σ + it`.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// `ζ(s) r^s / s`
    MomentOverS,
    /// `ζ^{(m)}(s) r^s`, `m ≤ 2`
    PlainMoment { m: u32 },
    /// `ζ(s) r^s / s²`
    InverseSquare,
    /// `ζ'(s) r^s / s`
    DerivativeOverS,
    /// `F(t)` of the master-theorem pairing; ignores `σ`.
    MasterF,
    /// `t sin(a t) / (σ² + t²)`
    SinKernel { a: f64 },
    /// `cos(a t) / (σ² + t²)`
    CosKernel { a: f64 },
    /// `lhs − rhs`, sharing one zeta evaluation per node.
    Difference { lhs: Box<Kernel>, rhs: Box<Kernel> },
}

impl Kernel {
    pub fn difference(lhs: Kernel, rhs: Kernel) -> Kernel {
        Kernel::Difference {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Highest zeta derivative needed, `None` when zeta is not involved
    /// along `σ + it`.
    fn zeta_order(&self) -> Option<u32> {
        match self {
            Kernel::MomentOverS | Kernel::InverseSquare => Some(0),
            Kernel::PlainMoment { m } => Some(*m),
            Kernel::DerivativeOverS => Some(1),
            Kernel::MasterF | Kernel::SinKernel { .. } | Kernel::CosKernel { .. } => None,
            Kernel::Difference { lhs, rhs } => match (lhs.zeta_order(), rhs.zeta_order()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }

    fn divides_by_s(&self) -> bool {
        match self {
            Kernel::MomentOverS | Kernel::InverseSquare | Kernel::DerivativeOverS => true,
            Kernel::Difference { lhs, rhs } => lhs.divides_by_s() || rhs.divides_by_s(),
            _ => false,
        }
    }

    fn uses_lemma_denominator(&self) -> bool {
        match self {
            Kernel::SinKernel { .. } | Kernel::CosKernel { .. } => true,
            Kernel::Difference { lhs, rhs } => lhs.uses_lemma_denominator() || rhs.uses_lemma_denominator(),
            _ => false,
        }
    }

    fn involves_master(&self) -> bool {
        match self {
            Kernel::MasterF => true,
            Kernel::Difference { lhs, rhs } => lhs.involves_master() || rhs.involves_master(),
            _ => false,
        }
    }

    fn lemma_freq(&self) -> f64 {
        match self {
            Kernel::SinKernel { a } | Kernel::CosKernel { a } => a.abs(),
            Kernel::Difference { lhs, rhs } => lhs.lemma_freq().max(rhs.lemma_freq()),
            _ => 0.0,
        }
    }

    fn eval(&self, t: f64, sigma: f64, r: f64, jet: &[Complex64; 3]) -> Result<Complex64, ZetaError> {
        let s = Complex64::new(sigma, t);
        let rs = || (s * r.ln()).exp();
        Ok(match self {
            Kernel::MomentOverS => jet[0] * rs() / s,
            Kernel::PlainMoment { m } => jet[*m as usize] * rs(),
            Kernel::InverseSquare => jet[0] * rs() / (s * s),
            Kernel::DerivativeOverS => jet[1] * rs() / s,
            Kernel::MasterF => master_f(Complex64::new(t, 0.0), r)?,
            Kernel::SinKernel { a } => Complex64::new(t * (a * t).sin() / (sigma * sigma + t * t), 0.0),
            Kernel::CosKernel { a } => Complex64::new((a * t).cos() / (sigma * sigma + t * t), 0.0),
            Kernel::Difference { lhs, rhs } => lhs.eval(t, sigma, r, jet)? - rhs.eval(t, sigma, r, jet)?,
        })
    }
}

/// Which part of the complex integrand is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Real,
    Imag,
    /// Point evaluation only; panels integrate real-valued parts.
    Full,
}

/// Integration range convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `∫_{t_from}^{t_to}` as requested.
    HalfLine,
    /// `∫_{-T}^{T}` folded onto `[0, T]` by conjugate symmetry: twice the
    /// real part, imaginary part identically zero.
    Symmetric,
}

/// Declarative description of one integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrandSpec {
    pub kernel: Kernel,
    pub sigma: f64,
    pub r: f64,
    pub component: Component,
    pub domain: Domain,
    /// Constant multiplier applied to every value.
    pub weight: f64,
}

impl IntegrandSpec {
    pub fn new(kernel: Kernel, sigma: f64, r: f64) -> Self {
        Self {
            kernel,
            sigma,
            r,
            component: Component::Real,
            domain: Domain::HalfLine,
            weight: 1.0,
        }
    }

    pub fn with_component(mut self, component: Component) -> Self {
        self.component = component;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    /// Angular frequency of the `r^{it}` factor (or of the lemma kernel).
    pub fn omega(&self) -> f64 {
        self.r.ln().abs().max(self.kernel.lemma_freq())
    }

    /// Full complex value at height `t` (times `weight`).
    pub fn eval(&self, t: f64) -> Result<Complex64, ZetaError> {
        let jet = match self.kernel.zeta_order() {
            Some(order) => zeta::zeta_jet(Complex64::new(self.sigma, t), order)?,
            None => [Complex64::new(0.0, 0.0); 3],
        };
        Ok(self.kernel.eval(t, self.sigma, self.r, &jet)? * self.weight)
    }

    /// The real-valued quantity integrated over panels.
    pub fn eval_component(&self, t: f64) -> Result<f64, ZetaError> {
        let v = self.eval(t)?;
        Ok(match self.component {
            Component::Imag => v.im,
            Component::Real | Component::Full => v.re,
        })
    }

    /// Multiplier folding a symmetric range onto the half line.
    pub fn domain_factor(&self) -> f64 {
        match self.domain {
            Domain::HalfLine => 1.0,
            Domain::Symmetric => 2.0,
        }
    }

    /// Initial equal pieces for a panel so the node budget is respected.
    pub fn initial_pieces(&self, a: f64, b: f64) -> usize {
        let height = a.abs().max(b.abs()).max(1.0);
        let zeta_freq = if self.kernel.zeta_order().is_some() || self.kernel.involves_master() {
            height.ln().max(0.0)
        } else {
            0.0
        };
        let nodes = node_budget((self.omega() + zeta_freq) * (b - a));
        nodes.div_ceil(super::NODES_PER_RULE).max(1)
    }

    /// Checks the request against the integrand's singularities.
    pub fn validate(&self, t_from: f64, t_to: f64) -> Result<(), QuadratureError> {
        let bad = |msg: String| Err(QuadratureError::InvalidRequest(msg));
        if !(self.r > 0.0) || !self.r.is_finite() {
            return bad(format!("r must be positive and finite, got {}", self.r));
        }
        if !self.weight.is_finite() {
            return bad("weight must be finite".into());
        }
        if !t_from.is_finite() || !t_to.is_finite() {
            return bad("range must be finite".into());
        }
        if self.domain == Domain::Symmetric {
            if t_from < 0.0 {
                return bad("symmetric domain folds onto t ≥ 0; start at a non-negative height".into());
            }
            if self.component == Component::Imag {
                return bad("imaginary part of a symmetric integral vanishes identically".into());
            }
        }
        if self.component == Component::Full {
            return bad("panels integrate a real component; choose real or imag".into());
        }
        if let Some(order) = self.kernel.zeta_order() {
            if order > 2 {
                return Err(ZetaError::UnsupportedOrder(order).into());
            }
            if !(SIGMA_MIN..=SIGMA_MAX).contains(&self.sigma) {
                return bad(format!("σ = {} outside [{SIGMA_MIN}, {SIGMA_MAX}]", self.sigma));
            }
        }
        if self.kernel.involves_master() && t_from.abs().max(t_to.abs()) > HEIGHT_MAX {
            return bad(format!("|t| beyond {HEIGHT_MAX}"));
        }
        let crosses_zero = t_from <= 0.0 && t_to >= 0.0;
        if crosses_zero && self.kernel.divides_by_s() && self.sigma == 0.0 {
            return bad("1/s kernel has a pole at t = 0 when σ = 0".into());
        }
        if crosses_zero && self.kernel.uses_lemma_denominator() && self.sigma == 0.0 {
            return bad("lemma kernel denominator vanishes at t = 0 when σ = 0".into());
        }
        if crosses_zero && self.sigma == 1.0 && self.kernel.zeta_order().is_some() {
            // ζ(1+it) ≈ −i/t: only the real part of the undifferentiated
            // kernels is integrable across the pole
            if self.component != Component::Real {
                return bad("imaginary component at σ = 1 crosses the pole at t = 0".into());
            }
            if self.kernel.zeta_order() != Some(0) {
                return bad("derivative kernels at σ = 1 are not integrable across t = 0".into());
            }
        }
        Ok(())
    }
}

/// `F(t) = ζ(1/2+it) r^{1/2+it}/(1/2+it) − ζ(3/2−it) r^{3/2−it}/(3/2−it)`
/// for complex `t`.
pub fn master_f(t: Complex64, r: f64) -> Result<Complex64, ZetaError> {
    let i = Complex64::i();
    let ln_r = r.ln();
    let s1 = 0.5 + i * t;
    let s2 = 1.5 - i * t;
    let a = zeta::zeta(s1)? * (s1 * ln_r).exp() / s1;
    let b = zeta::zeta(s2)? * (s2 * ln_r).exp() / s2;
    Ok(a - b)
}
