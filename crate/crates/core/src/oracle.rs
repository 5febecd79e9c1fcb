//! Brute-force quadrature of every defining integral, independent of the
//! closed forms in [`crate::gaussian_analysis`].
//!
//! Two evaluations of the decoherence functional for Gaussian ⊗ Gaussian
//! states are provided:
//!
//! * [`general_functional_bound`] integrates the modulus of the integrand
//!   over (x, x′, x″). This is the quantity every Gaussian bound refers to.
//! * [`general_functional_exact`] keeps the phases. It uses the oscillator
//!   kernel product
//!   `K₀*(x;x″)K₀(x;x′) = |K₀|²·exp{ic[(x′² − x″²)cos ωT − 2x(x′ − x″)]}`
//!   with `c = mω/(2 sin ωT)`, in which the unknown global phase cancels, and
//!   does the x integral in closed form. [`sum_rule_check`] is built on it.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::coarse_grain::interval_bounds;
use crate::error::{Error, Result};
use crate::gaussian_analysis::FactorKind;
use crate::model::{GaussianSpec, InitialState, OscillatorParams, Partition};
use crate::propagator::{self, PropagatorConstants, SERIES_THRESHOLD};
use crate::quadrature::try_integrate;
pub use crate::quadrature::{Estimate, QuadratureSpec};
use crate::special::{erf, SQRT_2_OVER_PI};

/// Returns `(numeric, closed)` for ∫[erf(a + x)·erf(b − x) + 1] dx.
pub fn erf_product_integral(a: f64, b: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let lo = (-a).min(b) - spec.tail_cut;
    let hi = (-a).max(b) + spec.tail_cut;
    let numeric = try_integrate(|x| Ok(erf(a + x) * erf(b - x) + 1.0), lo, hi, &[-a, b], spec)?.value;
    let s = a + b;
    let closed = 2.0 * s * erf(s / SQRT_2) + 2.0 * SQRT_2_OVER_PI * (-s * s / 2.0).exp();
    Ok((numeric, closed))
}

/// `[lo, hi] ∩ [-c, c]`, or `None` if empty.
fn clip(lo: f64, hi: f64, c: f64) -> Option<(f64, f64)> {
    let (lo, hi) = (lo.max(-c), hi.min(c));
    (lo < hi).then_some((lo, hi))
}

/// ∫ e^{−z²}·weight(z) over `[lo, hi]` clipped to the tail window.
fn gauss_window(lo: f64, hi: f64, spec: &QuadratureSpec, weight: impl Fn(f64) -> f64) -> Result<f64> {
    match clip(lo, hi, spec.tail_cut) {
        None => Ok(0.0),
        Some((lo, hi)) => Ok(try_integrate(|z| Ok((-z * z).exp() * weight(z)), lo, hi, &[], spec)?.value),
    }
}

fn outer(f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    Ok(try_integrate(f, lo, hi, breaks, spec)?.value)
}

/// Direct nested quadrature of the defining integral of a factor at `arg`
/// (β for I, J, P0, P1; γ for F, G).
///
/// I, J, P0 and P1 integrate over w with every z window truncated at
/// `±tail_cut`. F and G are evaluated at w = 0 and re-evaluated at w = ±1 to
/// confirm that they do not depend on w.
pub fn oracle_factor(kind: FactorKind, arg: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(arg >= 0.0 && arg.is_finite()) {
        return Err(Error::config(format!("factor argument must be finite and >= 0, got {arg}")));
    }
    if arg == 0.0 {
        return Ok(0.0);
    }
    let (b, c) = (arg, spec.tail_cut);
    let (mid, inner) = (spec.inner(), spec.inner().inner());
    match kind {
        FactorKind::I => {
            let f = |w: f64| -> Result<f64> {
                Ok(gauss_window(w - b, w + b, &mid, |_| 1.0)? * gauss_window(w + b, w + 3.0 * b, &mid, |_| 1.0)?)
            };
            let breaks = [-c - b, -c + b, c - 3.0 * b, -c - 3.0 * b];
            outer(f, -c - b, c - b, &breaks, spec)
        }
        FactorKind::J => {
            let f = |w: f64| -> Result<f64> {
                let z1 = |z1: f64| -> Result<f64> {
                    Ok((-z1 * z1).exp() * gauss_window(w + b, w + 3.0 * b, &inner, |z2| (z2 - z1).powi(2))?)
                };
                match clip(w - b, w + b, c) {
                    None => Ok(0.0),
                    Some((lo, hi)) => outer(z1, lo, hi, &[], &mid),
                }
            };
            let breaks = [-c - b, -c + b, c - 3.0 * b, -c - 3.0 * b];
            outer(f, -c - b, c - b, &breaks, spec)
        }
        FactorKind::P0 => {
            let f = |w: f64| -> Result<f64> { Ok(gauss_window(w - b, w + b, &mid, |_| 1.0)?.powi(2)) };
            outer(f, -c - b, c + b, &[-c + b, c - b], spec)
        }
        FactorKind::P1 => {
            let f = |w: f64| -> Result<f64> {
                let z1 = |z1: f64| -> Result<f64> {
                    Ok((-z1 * z1).exp() * gauss_window(w - b, w + b, &inner, |z2| (z2 - z1).powi(2))?)
                };
                match clip(w - b, w + b, c) {
                    None => Ok(0.0),
                    Some((lo, hi)) => outer(z1, lo, hi, &[], &mid),
                }
            };
            outer(f, -c - b, c + b, &[-c + b, c - b, 0.0], spec)
        }
        FactorKind::F | FactorKind::G => {
            let at = |w: f64| pointer_inner(kind, b, w, spec);
            let centre = at(0.0)?;
            let tol = spec.abs_tol.max(spec.rel_tol * centre.abs());
            for w in [-1.0, 1.0] {
                let shifted = at(w)?;
                if (shifted - centre).abs() > tol {
                    return Err(Error::QuadratureFailure(format!(
                        "{} integral depends on w: {centre} at w=0, {shifted} at w={w}",
                        kind.name()
                    )));
                }
            }
            Ok(centre)
        }
    }
}

/// ∫_{w+γ}^{w+3γ}dz″ ∫_{w−γ}^{w+γ}dz′ e^{−(z″−z′)²}·weight, with
/// weight 1 for F and z″² + z′² − 2(w+γ)² for G. The z″ range is cut
/// `tail_cut` past z′.
fn pointer_inner(kind: FactorKind, gamma: f64, w: f64, spec: &QuadratureSpec) -> Result<f64> {
    let inner = spec.inner();
    let c = spec.tail_cut;
    let pivot = w + gamma;
    let row = |z1: f64| -> Result<f64> {
        let (lo, hi) = (pivot, (w + 3.0 * gamma).min(z1 + c));
        if lo >= hi {
            return Ok(0.0);
        }
        let integrand = |z2: f64| -> Result<f64> {
            let weight = match kind {
                FactorKind::G => z2 * z2 + z1 * z1 - 2.0 * pivot * pivot,
                _ => 1.0,
            };
            Ok((-(z2 - z1) * (z2 - z1)).exp() * weight)
        };
        Ok(try_integrate(integrand, lo, hi, &[], &inner)?.value)
    };
    let lo = (w - gamma).max(pivot - c);
    outer(row, lo, pivot, &[w + 3.0 * gamma - c], spec)
}

/// What the functional oracles need from the configuration.
struct Setup {
    k0: f64,
    g: f64,
    particle: GaussianSpec,
    pointer: GaussianSpec,
}

impl Setup {
    fn new(
        state: &InitialState,
        params: &OscillatorParams,
        partition: &Partition,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        spec.validate()?;
        params.validate()?;
        partition.validate()?;
        state.validate()?;
        let InitialState::Product { particle, pointer } = *state else {
            return Err(Error::config("the oracle needs a Gaussian particle and a Gaussian pointer"));
        };
        Ok(Self {
            k0: propagator::k0_for(params)?,
            g: propagator::coupling_g(&params.coupling, params.omega, params.duration)?,
            particle,
            pointer,
        })
    }

    /// Particle amplitude product ψ₀(x′)ψ₀(x″), ignoring |A|².
    fn gaussians(&self, x1: f64, x2: f64) -> f64 {
        let s = self.particle.halfwidth;
        let (u, v) = ((x1 - self.particle.center) / s, (x2 - self.particle.center) / s);
        (-(u * u) - v * v).exp()
    }

    fn overlap(&self, dx: f64) -> f64 {
        let ell = self.pointer.halfwidth;
        self.pointer.norm_sq() * (-(self.g * self.g) * dx * dx / (8.0 * ell * ell)).exp()
    }

    fn prefactor(&self) -> f64 {
        self.k0 * self.particle.amplitude_sq()
    }

    /// Particle tail window.
    fn window(&self, spec: &QuadratureSpec) -> (f64, f64) {
        let r = spec.tail_cut * self.particle.halfwidth;
        (self.particle.center - r, self.particle.center + r)
    }

    /// Breakpoints that resolve a narrow pointer overlap around x″ = x′.
    fn overlap_breaks(&self, x1: f64) -> [f64; 3] {
        let width = if self.g == 0.0 { 0.0 } else { 8f64.sqrt() * self.pointer.halfwidth / self.g.abs() };
        [x1 - width, x1, x1 + width]
    }
}

/// Modulus bound |D(c_α, c_α′)| ≤ ∫dx dx′ dx″ |integrand| by nested quadrature
/// over x (outer), x′ and x″. For α = α′ it is the probability itself.
pub fn general_functional_bound(
    alpha: i64,
    alpha_prime: i64,
    state: &InitialState,
    params: &OscillatorParams,
    partition: &Partition,
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    let setup = Setup::new(state, params, partition, spec)?;
    let (w_lo, w_hi) = setup.window(spec);
    let (a_lo, a_hi) = interval_bounds(alpha, partition);
    let (b_lo, b_hi) = interval_bounds(alpha_prime, partition);
    let (mid, inner) = (spec.inner(), spec.inner().inner());

    // (x + x′)/2 ∈ Δ_α  ⇔  x′ ∈ (2·lo − x, 2·hi − x]
    let x_lo = (2.0 * a_lo - w_hi).max(2.0 * b_lo - w_hi);
    let x_hi = (2.0 * a_hi - w_lo).min(2.0 * b_hi - w_lo);
    if x_lo >= x_hi {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let x_breaks: Vec<f64> = [a_lo, a_hi, b_lo, b_hi].iter().flat_map(|&e| [2.0 * e - w_lo, 2.0 * e - w_hi]).collect();

    let over_x = |x: f64| -> Result<f64> {
        let Some((p_lo, p_hi)) = clip_to(2.0 * a_lo - x, 2.0 * a_hi - x, w_lo, w_hi) else { return Ok(0.0) };
        let Some((q_lo, q_hi)) = clip_to(2.0 * b_lo - x, 2.0 * b_hi - x, w_lo, w_hi) else { return Ok(0.0) };
        let over_x1 = |x1: f64| -> Result<f64> {
            let over_x2 = |x2: f64| Ok(setup.gaussians(x1, x2) * setup.overlap(x2 - x1));
            Ok(try_integrate(over_x2, q_lo, q_hi, &setup.overlap_breaks(x1), &inner)?.value)
        };
        let breaks = [q_lo, q_hi];
        Ok(try_integrate(over_x1, p_lo, p_hi, &breaks, &mid)?.value)
    };
    let est = try_integrate(over_x, x_lo, x_hi, &x_breaks, spec)?;
    let pref = setup.prefactor();
    Ok(Estimate { value: pref * est.value, error: pref * est.error, evaluations: est.evaluations })
}

fn clip_to(lo: f64, hi: f64, w_lo: f64, w_hi: f64) -> Option<(f64, f64)> {
    let (lo, hi) = (lo.max(w_lo), hi.min(w_hi));
    (lo < hi).then_some((lo, hi))
}

/// `c = mω/(2 sin ωT)` and `cos ωT` of the oscillator kernel.
fn kernel_coefficients(params: &OscillatorParams) -> Result<(f64, f64)> {
    let omega_t = params.omega_t();
    if omega_t < SERIES_THRESHOLD {
        let c = params.mass / (2.0 * params.duration) * (1.0 + omega_t * omega_t / 6.0);
        return Ok((c, omega_t.cos()));
    }
    let s = propagator::sin_omega_t(params.omega, params.duration, params.allow_caustic_branch)?;
    Ok((params.mass * params.omega / (2.0 * s), omega_t.cos()))
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

/// The complex functional D(c_α, c_α′) including all phases.
///
/// The x integral over the set where both indicators are one is done in
/// closed form; (x′, x″) are integrated numerically over the particle tail
/// window.
pub fn general_functional_exact(
    alpha: i64,
    alpha_prime: i64,
    state: &InitialState,
    params: &OscillatorParams,
    partition: &Partition,
    spec: &QuadratureSpec,
) -> Result<Estimate<Complex64>> {
    let setup = Setup::new(state, params, partition, spec)?;
    let consts = PropagatorConstants::compute(params)?;
    let (c, cos_wt) = kernel_coefficients(params)?;
    let (w_lo, w_hi) = setup.window(spec);
    let (a_lo, a_hi) = interval_bounds(alpha, partition);
    let (b_lo, b_hi) = interval_bounds(alpha_prime, partition);
    let delta = partition.width;
    let shift = 2.0 * (alpha_prime - alpha) as f64 * delta;
    let inner = spec.inner();

    let over_x1 = |x1: f64| -> Result<Complex64> {
        let Some((lo, hi)) = clip_to(x1 + shift - 2.0 * delta, x1 + shift + 2.0 * delta, w_lo, w_hi) else {
            return Ok(Complex64::default());
        };
        let over_x2 = |x2: f64| -> Result<Complex64> {
            let x_lo = (2.0 * a_lo - x1).max(2.0 * b_lo - x2);
            let x_hi = (2.0 * a_hi - x1).min(2.0 * b_hi - x2);
            if x_lo >= x_hi {
                return Ok(Complex64::default());
            }
            let (m, h) = (0.5 * (x_lo + x_hi), 0.5 * (x_hi - x_lo));
            let q = 2.0 * c * (x1 - x2);
            let phase = c * cos_wt * (x1 * x1 - x2 * x2) + 0.5 * consts.phase_slope * (x1 - x2) - q * m;
            let modulus = setup.gaussians(x1, x2) * setup.overlap(x2 - x1) * 2.0 * h * sinc(q * h);
            Ok(Complex64::from_polar(1.0, phase) * modulus)
        };
        let [p, q, r] = setup.overlap_breaks(x1);
        let breaks = [x1 + shift, p, q, r];
        Ok(try_integrate(over_x2, lo, hi, &breaks, &inner)?.value)
    };
    let breaks: Vec<f64> =
        [-2.0, 0.0, 2.0].iter().flat_map(|&k| [w_lo - shift + k * delta, w_hi - shift + k * delta]).collect();
    let est = try_integrate(over_x1, w_lo, w_hi, &breaks, spec)?;
    let pref = setup.prefactor();
    Ok(Estimate { value: est.value * pref, error: est.error * pref, evaluations: est.evaluations })
}

/// Outcome of [`sum_rule_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRule {
    pub window: u32,
    /// Σ Re D(c_α, c_α′) over α, α′ ∈ [−N, N] with |α − α′| ≤ 1.
    pub partial_sum: f64,
    /// ⟨Ψ₀|Ψ₀⟩; 1 for normalized states.
    pub target: f64,
    /// |Σ Im D| over the same pairs.
    pub imag_residue: f64,
    /// Σ of modulus bounds for the pairs with |α − α′| ≥ 2, plus quadrature error estimates.
    pub error_bar: f64,
}

impl SumRule {
    pub fn deviation(&self) -> f64 {
        (self.partial_sum - self.target).abs()
    }
}

/// Σ_{α,α′ ∈ [−N, N]} D(c_α, c_α′) compared with ⟨Ψ₀|Ψ₀⟩.
///
/// Windows are centred on the interval containing the particle centre.
/// Pairs with |α − α′| ≥ 2 are not summed; their modulus bounds enter the
/// error bar. Pairs further apart than the particle tail window allows are
/// identically zero and skipped.
pub fn sum_rule_check(
    state: &InitialState,
    params: &OscillatorParams,
    partition: &Partition,
    window: u32,
    spec: &QuadratureSpec,
) -> Result<SumRule> {
    let setup = Setup::new(state, params, partition, spec)?;
    let target = setup.particle.norm_sq() * setup.pointer.norm_sq();
    let centre = crate::coarse_grain::interval_index(setup.particle.center, partition);
    let n = window as i64;
    let reach = (1.0 + spec.tail_cut * setup.particle.halfwidth / partition.width).ceil() as i64;

    let mut sum = Complex64::default();
    let mut error_bar = 0.0;
    for a in (centre - n)..=(centre + n) {
        for b in (a - reach).max(centre - n)..=(a + reach).min(centre + n) {
            if (a - b).abs() <= 1 {
                let est = general_functional_exact(a, b, state, params, partition, spec)?;
                sum += est.value;
                error_bar += est.error;
            } else {
                let est = general_functional_bound(a, b, state, params, partition, spec)?;
                error_bar += est.value + est.error;
            }
        }
    }
    Ok(SumRule { window, partial_sum: sum.re, target, imag_residue: sum.im.abs(), error_bar })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian_analysis::{self, JForm};
    use crate::model::{Normalization, TimeProfile};
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn erf_product_examples() {
        let (n, c) = erf_product_integral(0.0, 0.0, &spec()).unwrap();
        assert!((c - 2.0 * SQRT_2_OVER_PI).abs() < 1e-15);
        assert!((n - c).abs() < 1e-10);
        let (n, c) = erf_product_integral(1.0, -1.0, &spec()).unwrap();
        assert!((c - 2.0 * SQRT_2_OVER_PI).abs() < 1e-15 && (n - c).abs() < 1e-10);
        let (n, c) = erf_product_integral(1.0, 1.0, &spec()).unwrap();
        let want = 4.0 * erf(SQRT_2) + 2.0 * SQRT_2_OVER_PI * (-2f64).exp();
        assert!((c - want).abs() < 1e-14 && (n - c).abs() < 1e-10);
    }

    #[test]
    fn factor_oracles_match_closed_forms() {
        for kind in FactorKind::ALL {
            for arg in [0.25, 1.0, 3.0] {
                let o = oracle_factor(kind, arg, &spec()).unwrap();
                let c = kind.closed_form(arg, JForm::Appendix);
                assert!((o - c).abs() < 1e-7, "{kind:?}({arg}): oracle {o} closed {c}");
            }
            assert_eq!(oracle_factor(kind, 0.0, &spec()).unwrap(), 0.0);
        }
    }

    #[test]
    fn oracle_separates_j_forms() {
        let o = oracle_factor(FactorKind::J, 0.5, &spec()).unwrap();
        assert!((o - gaussian_analysis::j_factor(0.5, JForm::Appendix)).abs() < 1e-8);
        assert!((o - gaussian_analysis::j_factor(0.5, JForm::MainText)).abs() > 0.1);
    }

    #[test]
    fn oracle_separates_p1_forms() {
        let o = oracle_factor(FactorKind::P1, 1.0, &spec()).unwrap();
        assert!((o - gaussian_analysis::probability_kernels(1.0).p1).abs() < 1e-8);
        assert!((o - gaussian_analysis::p1_single_coefficient(1.0)).abs() > 0.1);
    }

    #[test]
    fn oracle_rejects_bad_input() {
        assert!(oracle_factor(FactorKind::I, -1.0, &spec()).is_err());
        let bad = QuadratureSpec { rel_tol: 0.0, ..spec() };
        assert!(oracle_factor(FactorKind::I, 1.0, &bad).is_err());
    }

    #[test]
    fn refinement_is_stable() {
        let coarse = spec().with_rel_tol(1e-6);
        let fine = spec().with_rel_tol(5e-7);
        for kind in FactorKind::ALL {
            let a = oracle_factor(kind, 1.72, &coarse).unwrap();
            let b = oracle_factor(kind, 1.72, &fine).unwrap();
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{kind:?}: {a} vs {b}");
        }
    }

    fn product(sigma: f64, ell: f64) -> InitialState {
        InitialState::Product {
            particle: GaussianSpec::new(0.0, sigma, Normalization::L2Normalized),
            pointer: GaussianSpec::new(0.0, ell, Normalization::L2Normalized),
        }
    }

    fn params() -> OscillatorParams {
        OscillatorParams::new(1.0, 1.0, PI / 2.0)
    }

    #[test]
    fn uncoupled_diagonal_matches_p0() {
        let uncoupled = params().with_coupling(TimeProfile::zero());
        let part = Partition::new(1.0, 0.0);
        let sigma = 0.4;
        let d = general_functional_bound(0, 0, &product(sigma, 0.1), &uncoupled, &part, &spec()).unwrap();
        let k0 = 1.0 / (2.0 * PI);
        let want = k0 * SQRT_2_OVER_PI / sigma * sigma.powi(3) * gaussian_analysis::probability_kernels(2.5).p0;
        assert!((d.value - want).abs() < 1e-8 * want, "{} vs {want}", d.value);

        let exact = general_functional_exact(0, 0, &product(sigma, 0.1), &uncoupled, &part, &spec()).unwrap();
        assert!(exact.value.im.abs() < 1e-10);
        assert!(exact.value.re > 0.0);
    }

    #[test]
    fn adjacent_bound_sits_between_leading_and_two_term() {
        let part = Partition::new(1.0, 0.0);
        let (sigma, ell) = (0.25, 0.5);
        let state = product(sigma, ell);
        let d = general_functional_bound(0, 1, &state, &params(), &part, &spec()).unwrap().value;
        let closed =
            gaussian_analysis::narrow_particle_bound(&params(), &part, sigma, ell, Normalization::L2Normalized)
                .unwrap();
        assert!(d <= closed.leading, "{d} > {}", closed.leading);
        assert!(d >= closed.total(), "{d} < {}", closed.total());

        let far = general_functional_bound(0, 3, &state, &params(), &part, &spec()).unwrap().value;
        let diag = general_functional_bound(0, 0, &state, &params(), &part, &spec()).unwrap().value;
        assert!(far <= 1e-6 * diag);
    }

    #[test]
    fn exact_functional_is_hermitian_and_bounded() {
        let part = Partition::new(1.5, 0.0);
        let p = OscillatorParams::new(1.0, 1.0, 1.0).with_driving(TimeProfile::Const(1.0));
        let state = product(0.3, 0.5);
        let ab = general_functional_exact(0, 1, &state, &p, &part, &spec()).unwrap().value;
        let ba = general_functional_exact(1, 0, &state, &p, &part, &spec()).unwrap().value;
        assert!((ab - ba.conj()).norm() < 1e-9, "{ab} vs {ba}");
        let bound = general_functional_bound(0, 1, &state, &p, &part, &spec()).unwrap().value;
        assert!(ab.norm() <= bound * (1.0 + 1e-8));
        let diag = general_functional_exact(0, 0, &state, &p, &part, &spec()).unwrap().value;
        let diag_bound = general_functional_bound(0, 0, &state, &p, &part, &spec()).unwrap().value;
        assert!(diag.im.abs() <= 1e-10 && diag.re > 0.0 && diag.re <= diag_bound);
    }

    #[test]
    fn oracle_requires_gaussian_product() {
        let state = InitialState::SharpPointer { particle: GaussianSpec::new(0.0, 0.2, Normalization::L2Normalized) };
        let r = general_functional_bound(0, 0, &state, &params(), &Partition::new(1.0, 0.0), &spec());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn sum_rule_converges() {
        let part = Partition::new(1.5, 0.0);
        let p = OscillatorParams::new(1.0, 1.0, 1.0).with_driving(TimeProfile::Const(1.0));
        let state = product(0.3, 0.5);
        let mut last = f64::INFINITY;
        for n in [2, 4, 6] {
            let r = sum_rule_check(&state, &p, &part, n, &spec()).unwrap();
            assert_eq!(r.target, 1.0);
            assert!(r.deviation() <= last + spec().abs_tol, "N={n}: {r:?}");
            assert!(r.imag_residue < 1e-8 && r.error_bar < 1e-6);
            last = r.deviation();
        }
        assert!(last < 1e-3, "{last}");
    }
}
