//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The integrator keeps a pool of segments and always bisects the one with
//! the largest error estimate, in the style of QUADPACK's `qag`. Integrands
//! may be real or complex, and may be fallible so that nested integrals can
//! propagate an inner failure instead of silently returning garbage.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
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
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_983_557_926,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Hard cap on the segment pool, independent of `max_depth`.
const MAX_SEGMENTS: usize = 20_000;

/// Tolerances and truncation for every numerical integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any single segment.
    pub max_depth: u32,
    /// Infinite ranges are truncated this many Gaussian half-widths from the
    /// peak, where the integrand has fallen below `exp(-tail_cut²)`.
    pub tail_cut: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-10, max_depth: 40, tail_cut: 8.0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::NonPositive { name: "rel_tol", value: self.rel_tol });
        }
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(Error::NonPositive { name: "abs_tol", value: self.abs_tol });
        }
        if self.tail_cut.is_nan() || self.tail_cut <= 0.0 {
            return Err(Error::NonPositive { name: "tail_cut", value: self.tail_cut });
        }
        if self.max_depth < 4 {
            return Err(Error::config(format!("max_depth must be >= 4, got {}", self.max_depth)));
        }
        Ok(())
    }

    /// Tolerances for an inner integral of a nested quadrature.
    pub fn inner(&self) -> Self {
        Self { rel_tol: self.rel_tol * 0.1, abs_tol: self.abs_tol * 0.1, ..*self }
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }
}

/// Values the integrator can accumulate.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    #[inline]
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    #[inline]
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates an infallible integrand over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    try_integrate(|x| Ok(f(x)), a, b, &[], spec)
}

/// Integrates a fallible integrand over `[a, b]`, starting from the segments
/// delimited by `breaks` (points outside the open interval are ignored).
/// The first error raised by the integrand aborts the integration.
pub fn try_integrate<T, F>(mut f: F, a: f64, b: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite limits [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate { value: T::default(), error: 0.0, evaluations: 0 });
    }
    if a > b {
        let mut est = try_integrate(f, b, a, breaks, spec)?;
        est.value = est.value * -1.0;
        return Ok(est);
    }

    let mut points: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    points.push(a);
    points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    points.push(b);
    points.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    points.dedup();

    let mut evaluations = 0;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment<T>> = Vec::new();
    let mut total = T::default();
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let seg = Segment::evaluate(&mut f, w[0], w[1], 0)?;
        evaluations += 21;
        total = total + seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    loop {
        let target = spec.abs_tol.max(spec.rel_tol * total.magnitude());
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::QuadratureFailure(format!(
                "tolerance {target:e} unmet on [{a}, {b}]: error estimate {total_err:e} with every segment at max depth"
            )));
        };
        if heap.len() + frozen.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure(format!(
                "segment limit reached on [{a}, {b}]: error estimate {total_err:e}, tolerance {target:e}"
            )));
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        if worst.depth >= spec.max_depth || mid <= worst.lo || mid >= worst.hi {
            frozen.push(worst);
            continue;
        }
        let left = Segment::evaluate(&mut f, worst.lo, mid, worst.depth + 1)?;
        let right = Segment::evaluate(&mut f, mid, worst.hi, worst.depth + 1)?;
        evaluations += 42;
        total = total - worst.value + left.value + right.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the pool so the running updates do not accumulate roundoff.
    let mut value = T::default();
    let mut error = 0.0;
    for seg in heap.iter().chain(frozen.iter()) {
        value = value + seg.value;
        error += seg.error;
    }
    Ok(Estimate { value, error, evaluations })
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
    depth: u32,
}

impl<T: QuadValue> Segment<T> {
    fn evaluate<F>(f: &mut F, lo: f64, hi: f64, depth: u32) -> Result<Self>
    where
        F: FnMut(f64) -> Result<T>,
    {
        let (value, error) = gauss_kronrod_21(f, lo, hi)?;
        if !value.magnitude().is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite integrand on [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, value, error, depth })
    }
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T> Eq for Segment<T> {}

impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<T, F>(f: &mut F, lo: f64, hi: f64) -> Result<(T, f64)>
where
    T: QuadValue,
    F: FnMut(f64) -> Result<T>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let f_center = f(center)?;
    let mut res_k = f_center * WGK[10];
    let mut res_g = T::default();
    let mut res_abs = f_center.magnitude() * WGK[10];
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        res_k = res_k + sum * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + sum * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let scale = half.abs();
    let value = res_k * half;
    let raw_err = ((res_k - res_g) * half).magnitude();
    Ok((value, rescale_error(raw_err, res_abs * scale, res_asc * scale)))
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let ratio = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if ratio < 1.0 { res_asc * ratio } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn kronrod_rule_is_exact_for_degree_30_polynomials() {
        for deg in [0, 1, 5, 19, 30] {
            let est = integrate(|x: f64| x.powi(deg), -1.0, 1.0, &spec()).unwrap();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((est.value - exact).abs() < 1e-14, "degree {deg}: {}", est.value);
        }
    }

    #[test]
    fn gaussian_over_truncated_line() {
        let est = integrate(|x: f64| (-x * x).exp(), -8.0, 8.0, &spec()).unwrap();
        assert!((est.value - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_negate() {
        let fwd = integrate(|x: f64| x.sin(), 0.0, 2.0, &spec()).unwrap().value;
        let rev = integrate(|x: f64| x.sin(), 2.0, 0.0, &spec()).unwrap().value;
        assert_eq!(fwd, -rev);
        assert!((fwd - (1.0 - 2f64.cos())).abs() < 1e-14);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let est = try_integrate(|x: f64| Ok((x - 0.3).abs()), -1.0, 1.0, &[0.3], &spec()).unwrap();
        assert!((est.value - (1.3f64.powi(2) + 0.7f64.powi(2)) / 2.0).abs() < 1e-15);
        assert_eq!(est.evaluations, 42);
    }

    #[test]
    fn adapts_to_a_discontinuity_without_breaks() {
        let step = |x: f64| if x > 0.123 { 1.0 } else { 0.0 };
        let est = integrate(step, 0.0, 1.0, &spec()).unwrap();
        assert!((est.value - 0.877).abs() < 1e-9);
    }

    #[test]
    fn complex_oscillatory_integrand() {
        let k = 40.0;
        let est = integrate(|x: f64| Complex64::new(0.0, k * x).exp(), 0.0, 1.0, &spec()).unwrap();
        let exact = (Complex64::new(0.0, k).exp() - 1.0) / Complex64::new(0.0, k);
        assert!((est.value - exact).norm() < 1e-12);
    }

    #[test]
    fn integrand_errors_propagate() {
        let res: Result<Estimate<f64>> =
            try_integrate(|x| if x > 0.5 { Err(Error::DecoupledApparatus) } else { Ok(x) }, 0.0, 1.0, &[], &spec());
        assert_eq!(res.unwrap_err(), Error::DecoupledApparatus);
    }

    #[test]
    fn unreachable_tolerance_is_a_failure() {
        let tight = QuadratureSpec { rel_tol: 1e-30, abs_tol: 1e-300, max_depth: 4, tail_cut: 8.0 };
        let res = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &tight);
        assert!(matches!(res, Err(Error::QuadratureFailure(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(spec().validate().is_ok());
        assert!(QuadratureSpec { rel_tol: 0.0, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { abs_tol: -1.0, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { max_depth: 3, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { tail_cut: 0.0, ..spec() }.validate().is_err());
    }
}
