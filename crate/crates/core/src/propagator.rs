//! Constants of the particle–pointer propagator that enter the decoherence
//! functional: the coupling g, the driving integrals A_D and B_D, the phase
//! φ(x̄) and the constant modulus |K_0|² of the oscillator kernel.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{OscillatorParams, TimeProfile, EPS_SING};
use crate::quadrature::{try_integrate, QuadratureSpec};

/// Below this value of ωT the free-particle limit forms are used.
pub const SERIES_THRESHOLD: f64 = 1e-4;

const SPEC_1D: QuadratureSpec = QuadratureSpec { rel_tol: 1e-10, abs_tol: 1e-14, max_depth: 40, tail_cut: 8.0 };
const SPEC_2D: QuadratureSpec = QuadratureSpec { rel_tol: 1e-8, abs_tol: 1e-13, max_depth: 40, tail_cut: 8.0 };

/// Fails when ωT is within `EPS_SING` of a nonzero multiple of π.
fn guard_singular(omega_t: f64) -> Result<()> {
    let n = (omega_t / PI).round();
    if n >= 1.0 && (omega_t - n * PI).abs() < EPS_SING {
        return Err(Error::SingularPropagator { omega_t, eps: EPS_SING });
    }
    Ok(())
}

/// `sin ωT` after the singularity and branch checks.
pub fn sin_omega_t(omega: f64, duration: f64, allow_caustic_branch: bool) -> Result<f64> {
    let omega_t = omega * duration;
    guard_singular(omega_t)?;
    let s = omega_t.sin();
    if s < 0.0 && !allow_caustic_branch {
        return Err(Error::NegativeDensity { omega_t });
    }
    Ok(s)
}

fn breakpoints(f: &TimeProfile, duration: f64) -> Vec<f64> {
    match f {
        TimeProfile::Table(rows) => rows.iter().map(|&(t, _)| t).filter(|&t| t > 0.0 && t < duration).collect(),
        _ => Vec::new(),
    }
}

fn moment(f: &TimeProfile, duration: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    let breaks = breakpoints(f, duration);
    Ok(try_integrate(|t| Ok(f.eval(t, duration) * weight(t)), 0.0, duration, &breaks, &SPEC_1D)?.value)
}

/// B = 2∫₀ᵀ f(t) sin ωt dt.
pub fn coupling_b(f: &TimeProfile, omega: f64, duration: f64) -> Result<f64> {
    match f {
        _ if f.is_zero() || omega == 0.0 => Ok(0.0),
        TimeProfile::Const(c) => {
            let half = (0.5 * omega * duration).sin();
            Ok(4.0 * c * half * half / omega)
        }
        _ => Ok(2.0 * moment(f, duration, |t| (omega * t).sin())?),
    }
}

/// g = B/(T sin ωT), or the free-particle limit (2/T²)∫₀ᵀ t f(t) dt with its
/// O((ωT)²) correction when ωT is below `SERIES_THRESHOLD`.
pub fn coupling_g(f: &TimeProfile, omega: f64, duration: f64) -> Result<f64> {
    let omega_t = omega * duration;
    guard_singular(omega_t)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    if omega_t < SERIES_THRESHOLD {
        let (m1, m3) = match f {
            TimeProfile::Const(c) => (c * duration.powi(2) / 2.0, c * duration.powi(4) / 4.0),
            _ => (moment(f, duration, |t| t)?, moment(f, duration, |t| t.powi(3))?),
        };
        let num = 2.0 * m1 - omega * omega / 3.0 * m3;
        return Ok(num / (duration * duration * (1.0 - omega_t * omega_t / 6.0)));
    }
    Ok(coupling_b(f, omega, duration)? / (duration * omega_t.sin()))
}

/// A_D = ∫₀ᵀdt∫₀ᵗds f_D(t) f_D(s) sin ω(T−t) sin ωs and B_D = 2∫₀ᵀ f_D(t) sin ωt dt.
pub fn driving_integrals(f_d: &TimeProfile, omega: f64, duration: f64) -> Result<(f64, f64)> {
    if f_d.is_zero() || omega == 0.0 {
        return Ok((0.0, 0.0));
    }
    let a_d = triangle_integral(f_d, duration, |t, s| (omega * (duration - t)).sin() * (omega * s).sin())?;
    Ok((a_d, coupling_b(f_d, omega, duration)?))
}

/// ∫₀ᵀdt∫₀ᵗds f(t) f(s) w(t, s).
fn triangle_integral(f: &TimeProfile, duration: f64, weight: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let breaks = breakpoints(f, duration);
    let inner_spec = SPEC_2D.inner();
    let outer = |t: f64| -> Result<f64> {
        let inner_breaks: Vec<f64> = breaks.iter().copied().filter(|&b| b < t).collect();
        let inner = try_integrate(|s| Ok(f.eval(s, duration) * weight(t, s)), 0.0, t, &inner_breaks, &inner_spec)?;
        Ok(f.eval(t, duration) * inner.value)
    };
    Ok(try_integrate(outer, 0.0, duration, &breaks, &SPEC_2D)?.value)
}

/// |K_0|² = mω/(2π sin ωT), restricted to 0 < ωT < π; the free-particle
/// limit m/(2πT) (with its (ωT)² correction) below `SERIES_THRESHOLD`.
pub fn k0_magnitude_sq(mass: f64, omega: f64, duration: f64) -> Result<f64> {
    k0_magnitude_sq_on_branch(mass, omega, duration, false)
}

/// As [`k0_magnitude_sq`], using |sin ωT| when the caustic branch is allowed.
pub fn k0_magnitude_sq_on_branch(mass: f64, omega: f64, duration: f64, allow_caustic_branch: bool) -> Result<f64> {
    let omega_t = omega * duration;
    if omega_t < SERIES_THRESHOLD {
        return Ok(mass / (2.0 * PI * duration) * (1.0 + omega_t * omega_t / 6.0));
    }
    let s = sin_omega_t(omega, duration, allow_caustic_branch)?;
    Ok(mass * omega / (2.0 * PI * s.abs()))
}

pub(crate) fn k0_for(params: &OscillatorParams) -> Result<f64> {
    k0_magnitude_sq_on_branch(params.mass, params.omega, params.duration, params.allow_caustic_branch)
}

/// s(x, x′) = g·(x + x′)/2 + d: the pointer displacement.
pub fn shift_function(x: f64, x_prime: f64, g: f64, d: f64) -> f64 {
    g * (x + x_prime) / 2.0 + d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConstants {
    pub b: f64,
    pub g: f64,
    pub a_d: f64,
    pub b_d: f64,
    pub k0_mag_sq: f64,
    /// dφ/dx̄ = B_D / sin ωT.
    pub phase_slope: f64,
    /// A_D / (mω sin ωT), so that φ(x̄) = x̄·slope − offset.
    pub phase_offset: f64,
}

impl PropagatorConstants {
    pub fn compute(params: &OscillatorParams) -> Result<Self> {
        params.validate()?;
        let (omega, duration) = (params.omega, params.duration);
        let b = coupling_b(&params.coupling, omega, duration)?;
        let g = coupling_g(&params.coupling, omega, duration)?;
        let (a_d, b_d) = driving_integrals(&params.driving, omega, duration)?;
        let k0_mag_sq = k0_for(params)?;
        let omega_t = omega * duration;
        let (phase_slope, phase_offset) = if params.driving.is_zero() {
            (0.0, 0.0)
        } else if omega_t < SERIES_THRESHOLD {
            let f = &params.driving;
            let slope = 2.0 / duration * moment(f, duration, |t| t)?;
            let offset = triangle_integral(f, duration, |t, s| (duration - t) * s)? / (params.mass * duration);
            (slope, offset)
        } else {
            let s = omega_t.sin();
            (b_d / s, a_d / (params.mass * omega * s))
        };
        Ok(Self { b, g, a_d, b_d, k0_mag_sq, phase_slope, phase_offset })
    }

    pub fn phase(&self, xbar: f64) -> f64 {
        self.phase_slope * xbar - self.phase_offset
    }
}

/// φ(x̄) = [x̄·B_D − A_D/(mω)] / sin ωT.
pub fn phase_phi(xbar: f64, consts: &PropagatorConstants) -> f64 {
    consts.phase(xbar)
}

/// Dense midpoint-rule value of ∫₀ᵀ f(t) dt, used by tests as a quadrature-free cross-check.
#[cfg(test)]
pub(crate) fn midpoint_sum(n: usize, duration: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h = duration / n as f64;
    (0..n).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_b_examples() {
        let one = TimeProfile::Const(1.0);
        assert!((coupling_b(&one, 1.0, PI / 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(coupling_b(&TimeProfile::zero(), 1.0, 1.0).unwrap(), 0.0);
        // 2∫₀¹ sin(ωt) dt ≈ ω for small ω
        let w = 1e-6;
        assert!((coupling_b(&one, w, 1.0).unwrap() / w - 1.0).abs() < 1e-9);
        // quadrature path agrees with the closed form
        let custom = TimeProfile::custom(|_| 1.0);
        assert!((coupling_b(&custom, 0.7, 2.3).unwrap() - coupling_b(&one, 0.7, 2.3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn coupling_g_examples() {
        let one = TimeProfile::Const(1.0);
        assert!((coupling_g(&one, 1.0, PI / 2.0).unwrap() - 4.0 / PI).abs() < 1e-14);
        assert!((coupling_g(&one, 0.0, 3.7).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(coupling_g(&TimeProfile::zero(), 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(coupling_g(&one, 1.0, PI), Err(Error::SingularPropagator { .. })));
    }

    #[test]
    fn coupling_g_invariant_under_time_reflection() {
        let duration = 1.7;
        let f = TimeProfile::custom(move |t| 1.0 + (t * (duration - t)).powi(2));
        let reflected = TimeProfile::custom(move |t: f64| {
            let r = duration - t;
            1.0 + (r * (duration - r)).powi(2)
        });
        for omega in [0.3, 1.1, 1.7] {
            let a = coupling_g(&f, omega, duration).unwrap();
            let b = coupling_g(&reflected, omega, duration).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn free_particle_continuity() {
        let profiles = [TimeProfile::Const(1.0), TimeProfile::SineWindow(1.3)];
        let (m, duration) = (1.4, 0.9);
        for f in &profiles {
            let g_limit = coupling_g(f, 0.0, duration).unwrap();
            for omega in [1e-3, 1e-5] {
                let g = coupling_g(f, omega, duration).unwrap();
                assert!((g - g_limit).abs() <= 1e-5 * g_limit.abs(), "g({omega}) = {g}, limit {g_limit}");
                let k = k0_magnitude_sq(m, omega, duration).unwrap();
                let k_limit = m / (2.0 * PI * duration);
                assert!((k - k_limit).abs() <= 1e-5 * k_limit);
            }
        }
        // series branch matches the direct branch across the threshold
        let f = TimeProfile::SineWindow(1.0);
        let below = coupling_g(&f, 0.99 * SERIES_THRESHOLD, 1.0).unwrap();
        let above = coupling_g(&f, 1.01 * SERIES_THRESHOLD, 1.0).unwrap();
        assert!((below - above).abs() < 1e-9 * below);
    }

    #[test]
    fn driving_integral_examples() {
        assert_eq!(driving_integrals(&TimeProfile::zero(), 1.0, 1.0).unwrap(), (0.0, 0.0));

        let (a_d, b_d) = driving_integrals(&TimeProfile::Const(1.0), 1.0, PI).unwrap();
        assert!((b_d - 4.0).abs() < 1e-13);
        // independent dense-grid double sum over the triangle s < t
        let n = 2000;
        let h = PI / n as f64;
        let mut dense = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            let inner = midpoint_sum(i.max(1), t, |s| s.sin());
            dense += (PI - t).sin() * inner * h;
        }
        assert!((a_d - dense).abs() < 1e-5, "A_D = {a_d}, dense sum = {dense}");
        assert!((a_d - 2.0).abs() < 1e-9);

        let c = 3.0;
        let (a_c, b_c) = driving_integrals(&TimeProfile::Const(c), 1.0, PI).unwrap();
        assert!((a_c - c * c * a_d).abs() < 1e-9 * a_c);
        assert!((b_c - c * b_d).abs() < 1e-12 * b_c);
    }

    #[test]
    fn k0_examples() {
        assert!((k0_magnitude_sq(1.0, 1.0, PI / 2.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((k0_magnitude_sq(2.0, 1.0, PI / 2.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((k0_magnitude_sq(1.0, 0.0, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(matches!(k0_magnitude_sq(1.0, 1.0, PI), Err(Error::SingularPropagator { .. })));
        assert!(matches!(k0_magnitude_sq(1.0, 1.0, 4.0), Err(Error::NegativeDensity { .. })));
        let caustic = k0_magnitude_sq_on_branch(1.0, 1.0, 4.0, true).unwrap();
        assert!((caustic - 1.0 / (2.0 * PI * 4f64.sin().abs())).abs() < 1e-15);
    }

    #[test]
    fn shift_function_examples() {
        assert_eq!(shift_function(1.0, 3.0, 1.0, 0.0), 2.0);
        assert_eq!(shift_function(-2.5, 2.5, 7.0, 0.5), 0.5);
        assert!((shift_function(PI / 4.0, PI / 4.0, 4.0 / PI, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_examples() {
        let params = OscillatorParams::new(1.0, 1.0, PI / 2.0);
        let consts = PropagatorConstants::compute(&params).unwrap();
        assert_eq!(phase_phi(3.2, &consts), 0.0);

        let manual = PropagatorConstants { a_d: 1.0, b_d: 0.0, phase_slope: 0.0, phase_offset: 1.0, ..consts };
        assert_eq!(phase_phi(0.0, &manual), -1.0);

        let driven = params.with_driving(TimeProfile::SineWindow(2.0));
        let c = PropagatorConstants::compute(&driven).unwrap();
        let (x1, x2) = (0.37, -1.9);
        let lhs = phase_phi(x1, &c) + phase_phi(x2, &c) - phase_phi(0.0, &c);
        assert!((lhs - phase_phi(x1 + x2, &c)).abs() < 1e-12);
        let h = 1e-3;
        let fd = (phase_phi(0.2 + h, &c) - phase_phi(0.2 - h, &c)) / (2.0 * h);
        let slope = c.b_d / (PI / 2.0).sin();
        assert!((fd - slope).abs() < 1e-10 * slope.abs().max(1.0));
    }

    #[test]
    fn phase_limit_is_continuous_in_omega() {
        let f = TimeProfile::SineWindow(1.5);
        let at = |omega: f64| {
            let p = OscillatorParams::new(1.2, omega, 0.8).with_driving(f.clone());
            PropagatorConstants::compute(&p).unwrap()
        };
        let lim = at(0.0);
        let near = at(2e-3);
        assert!((lim.phase_slope - near.phase_slope).abs() < 1e-5 * lim.phase_slope.abs());
        assert!((lim.phase_offset - near.phase_offset).abs() < 1e-5 * lim.phase_offset.abs());
    }

    #[test]
    fn b_and_b_d_vanish_for_zero_profiles() {
        let params = OscillatorParams::new(1.0, 0.8, 1.0).with_coupling(TimeProfile::zero());
        let c = PropagatorConstants::compute(&params).unwrap();
        assert_eq!((c.b, c.g, c.a_d, c.b_d), (0.0, 0.0, 0.0, 0.0));
        assert!(c.k0_mag_sq > 0.0);
    }
}
