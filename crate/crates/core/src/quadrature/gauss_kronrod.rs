//! Adaptive 10/21-point Gauss–Kronrod integration.
//!
//! The error estimate follows QUADPACK's `qk21`; subdivision is global
//! (always bisect the interval with the largest error estimate).

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::cmp::Ordering;

use super::QuadratureError;
use crate::zeta::ZetaError;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Nodes used by one application of the base rule.
pub const NODES_PER_RULE: usize = 21;

/// Maximum number of bisections before a panel is declared non-convergent.
pub const MAX_SUBDIVISIONS: usize = 4000;

/// Values the rule can integrate: real or complex.
pub trait QuadValue:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
    + std::ops::AddAssign
    + Send
    + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Several real integrands sharing one set of nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadVec<const N: usize>(pub [f64; N]);

impl<const N: usize> std::ops::Add for QuadVec<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> std::ops::Sub for QuadVec<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> std::ops::Mul<f64> for QuadVec<N> {
    type Output = Self;
    fn mul(mut self, k: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= k;
        }
        self
    }
}

impl<const N: usize> std::ops::AddAssign for QuadVec<N> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl<const N: usize> QuadValue for QuadVec<N> {
    fn zero() -> Self {
        QuadVec([0.0; N])
    }
    fn magnitude(&self) -> f64 {
        // error control on the worst component
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Result of one rule application over `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct RuleEstimate<V> {
    pub value: V,
    pub err: f64,
}

/// One 21-point Kronrod evaluation with its embedded 10-point Gauss estimate.
pub fn gk21<V, F>(f: &mut F, a: f64, b: f64) -> Result<RuleEstimate<V>, ZetaError>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V, ZetaError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [V::zero(); 10];
    let mut fv2 = [V::zero(); 10];

    let f_center = f(center)?;
    let mut res_g = V::zero();
    let mut res_k = f_center * WGK[10];
    let mut res_abs = f_center.magnitude() * WGK[10];

    for j in 0..5 {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx)?, f(center + dx)?);
        fv1[k] = f1;
        fv2[k] = f2;
        res_g += (f1 + f2) * WG[j];
        res_k += (f1 + f2) * WGK[k];
        res_abs += WGK[k] * (f1.magnitude() + f2.magnitude());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx)?, f(center + dx)?);
        fv1[k] = f1;
        fv2[k] = f2;
        res_k += (f1 + f2) * WGK[k];
        res_abs += WGK[k] * (f1.magnitude() + f2.magnitude());
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).magnitude();
    for k in 0..10 {
        res_asc += WGK[k] * ((fv1[k] - mean).magnitude() + (fv2[k] - mean).magnitude());
    }
    let abs_half = half.abs();
    let raw_err = ((res_k - res_g) * half).magnitude();
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;

    Ok(RuleEstimate {
        value: res_k * half,
        err: rescale_error(raw_err, res_abs, res_asc),
    })
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

struct Piece<V> {
    a: f64,
    b: f64,
    est: RuleEstimate<V>,
}

impl<V> PartialEq for Piece<V> {
    fn eq(&self, other: &Self) -> bool {
        self.est.err == other.est.err
    }
}
impl<V> Eq for Piece<V> {}
impl<V> PartialOrd for Piece<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Piece<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .err
            .partial_cmp(&other.est.err)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// Globally adaptive integration of `f` over `[a, b]`, starting from
/// `initial_pieces` equal sub-intervals. Stops when the summed error estimate
/// is at most `tol`.
pub fn adaptive<V, F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    initial_pieces: usize,
) -> Result<RuleEstimate<V>, QuadratureError>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V, ZetaError>,
{
    let n0 = initial_pieces.max(1);
    let width = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(n0 + 16);
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { a + width * (i + 1) as f64 };
        let est = gk21(&mut f, lo, hi)?;
        heap.push(Piece { a: lo, b: hi, est });
    }

    let mut bisections = 0;
    loop {
        let total_err: f64 = heap.iter().map(|p| p.est.err).sum();
        if total_err <= tol {
            break;
        }
        if bisections >= MAX_SUBDIVISIONS {
            return Err(QuadratureError::NonConvergence {
                a,
                b,
                err: total_err,
                tol,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at double precision
            return Err(QuadratureError::NonConvergence {
                a,
                b,
                err: total_err,
                tol,
            });
        }
        let left = gk21(&mut f, worst.a, mid)?;
        let right = gk21(&mut f, mid, worst.b)?;
        heap.push(Piece { a: worst.a, b: mid, est: left });
        heap.push(Piece { a: mid, b: worst.b, est: right });
        bisections += 1;
    }

    // sum in ascending abscissa order so the result does not depend on heap layout
    let mut pieces = heap.into_vec();
    pieces.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let mut value = V::zero();
    let mut err = 0.0;
    for p in &pieces {
        value += p.est.value;
        err += p.est.err;
    }
    Ok(RuleEstimate { value, err })
}
