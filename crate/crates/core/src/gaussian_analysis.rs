//! Closed-form decoherence bounds and approximate probabilities for Gaussian
//! particle ⊗ Gaussian pointer initial states.
//!
//! Two regimes are covered. A narrow particle (σ ≪ δ) is expanded in
//! κ²σ², with κ = g/(√8·ℓ), and is governed by the dimensionless factors
//! I(β), J(β) (bound) and P₀(β), P₁(β) (probability), β = δ/σ. A narrow
//! pointer (ℓ ≪ δ) is expanded in 1/(κσ)² and is governed by F(γ), G(γ),
//! γ = κδ.
//!
//! Each factor is the closed-form value of a dimensionless integral that
//! [`crate::oracle::oracle_factor`] evaluates by brute force.
//!
//! Comparison constants: the cruder boundary-layer estimates are
//! `|D| ≤ mω|A|²σ³/(π sin ωT)` for a narrow particle and
//! `mωℓ²/(πg² sin ωT)` for a narrow pointer. The exact leading terms below
//! supersede them; the pointer one is exactly twice the estimate.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::model::{self, Normalization, OscillatorParams, Partition};
use crate::propagator;
use crate::special::{erf, SQRT_2PI, SQRT_HALF_PI, SQRT_PI};

/// Which coefficient of e^{−8β²} to use in J(β).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JForm {
    /// `√(2π)·e^{−8β²}`: agrees with the defining integral, J(0) = 0.
    #[default]
    Appendix,
    /// `2√(2π)·e^{−8β²}`: gives J(0) = √(2π) and disagrees with the integral.
    MainText,
}

impl JForm {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "appendix" => Ok(JForm::Appendix),
            "main-text" => Ok(JForm::MainText),
            other => Err(Error::config(format!("unknown J form '{other}' (expected appendix or main-text)"))),
        }
    }
}

/// The six dimensionless factor integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    I,
    J,
    F,
    G,
    P0,
    P1,
}

impl FactorKind {
    pub const ALL: [FactorKind; 6] =
        [FactorKind::I, FactorKind::J, FactorKind::F, FactorKind::G, FactorKind::P0, FactorKind::P1];

    pub fn name(self) -> &'static str {
        match self {
            FactorKind::I => "I",
            FactorKind::J => "J",
            FactorKind::F => "F",
            FactorKind::G => "G",
            FactorKind::P0 => "P0",
            FactorKind::P1 => "P1",
        }
    }

    /// Closed-form value at β (I, J, P0, P1) or γ (F, G).
    pub fn closed_form(self, arg: f64, form: JForm) -> f64 {
        match self {
            FactorKind::I => i_factor(arg),
            FactorKind::J => j_factor(arg, form),
            FactorKind::F => pointer_factors(arg).f,
            FactorKind::G => pointer_factors(arg).g,
            FactorKind::P0 => probability_kernels(arg).p0,
            FactorKind::P1 => probability_kernels(arg).p1,
        }
    }
}

/// Δ_overlap = exp[−g²·dx²/(8ℓ²)] for a normalized Gaussian pointer of half-width ℓ.
pub fn pointer_overlap_gaussian(dx: f64, g: f64, ell: f64) -> f64 {
    (-(g * g) * dx * dx / (8.0 * ell * ell)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleFactors {
    pub i: f64,
    pub j: f64,
}

/// 2πβ[erf(2√2β) − erf(√2β)], shared by I and J.
fn erf_window(beta: f64) -> f64 {
    2.0 * PI * beta * (erf(2.0 * SQRT_2 * beta) - erf(SQRT_2 * beta))
}

pub fn i_factor(beta: f64) -> f64 {
    let (e2, e8) = ((-2.0 * beta * beta).exp(), (-8.0 * beta * beta).exp());
    SQRT_2PI * (0.5 - e2 + 0.5 * e8) + erf_window(beta)
}

pub fn j_factor(beta: f64, form: JForm) -> f64 {
    let (e2, e8) = ((-2.0 * beta * beta).exp(), (-8.0 * beta * beta).exp());
    let c8 = match form {
        JForm::Appendix => 1.0,
        JForm::MainText => 2.0,
    };
    SQRT_2PI * (1.0 - 2.0 * e2 + c8 * e8) + erf_window(beta)
}

/// I(β) and J(β) for adjacent classes α′ = α + 1. I → √(2π)/2 and J → √(2π) as β → ∞.
pub fn particle_factors(beta: f64) -> ParticleFactors {
    particle_factors_with(beta, JForm::Appendix)
}

pub fn particle_factors_with(beta: f64, form: JForm) -> ParticleFactors {
    ParticleFactors { i: i_factor(beta), j: j_factor(beta, form) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerFactors {
    pub f: f64,
    pub g: f64,
}

/// F(γ) and G(γ); F → 1/2 and G → 1/3 as γ → ∞.
///
/// G is reported as a positive magnitude: its defining integrand carries
/// `[−z″² − z′² + 2(w+γ)²]`, which is negative throughout the region that
/// matters, and the sign is applied in [`narrow_pointer_bound`].
pub fn pointer_factors(gamma: f64) -> PointerFactors {
    let g2 = gamma * gamma;
    let (e4, e16) = ((-4.0 * g2).exp(), (-16.0 * g2).exp());
    let window = erf(4.0 * gamma) - erf(2.0 * gamma);
    let f = 0.5 * (1.0 + e16 - 2.0 * e4 + 4.0 * SQRT_PI * gamma * window);
    let poly = 1.0 + 4.0 * g2;
    let g = (1.0 + poly * e16 - 2.0 * poly * e4 + SQRT_PI * gamma * (3.0 + 16.0 * g2) * window) / 3.0;
    PointerFactors { f, g }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityKernels {
    pub p0: f64,
    pub p1: f64,
}

/// P₀(β) = ∫dw [∫_{w−β}^{w+β} e^{−z²}dz]² and
/// P₁(β) = ∫dw ∬_{[w−β,w+β]²} (z″ − z′)² e^{−z′²−z″²}.
///
/// Both grow as 2πβ for large β.
pub fn probability_kernels(beta: f64) -> ProbabilityKernels {
    let tail = 1.0 - (-2.0 * beta * beta).exp();
    let linear = 2.0 * PI * beta * erf(SQRT_2 * beta);
    ProbabilityKernels { p0: linear - SQRT_2PI * tail, p1: linear - 2.0 * SQRT_2PI * tail }
}

/// P₁ with a `√(2π)` coefficient on `(−1 + e^{−2β²})`, i.e. identical to P₀.
/// Kept to show that it does not match the integral; see [`probability_kernels`].
pub fn p1_single_coefficient(beta: f64) -> f64 {
    probability_kernels(beta).p0
}

/// A two-term expansion `leading + correction` with its smallness parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionBound {
    pub leading: f64,
    /// Signed next-order term.
    pub correction: f64,
    /// `condition_ratio < 1`.
    pub valid: bool,
    pub condition_ratio: f64,
    /// Set when a secondary regime assumption (ℓ ≪ δ, γ ≫ 1) is doubtful.
    pub warning: Option<&'static str>,
}

impl ExpansionBound {
    fn new(leading: f64, correction: f64, condition_ratio: f64) -> Self {
        Self { leading, correction, valid: condition_ratio < 1.0, condition_ratio, warning: None }
    }

    pub fn total(&self) -> f64 {
        self.leading + self.correction
    }

    pub fn to_functional_result(&self) -> model::FunctionalResult {
        model::FunctionalResult {
            kind: model::ResultKind::UpperBound,
            order0: self.leading,
            order1: self.correction,
            total: self.total(),
            method: model::Method::ClosedForm,
            estimated_error: 0.0,
        }
    }
}

/// Shared inputs of the Gaussian closed forms.
struct Inputs {
    k0: f64,
    g: f64,
    delta: f64,
}

fn inputs(params: &OscillatorParams, partition: &Partition, widths: &[(&'static str, f64)]) -> Result<Inputs> {
    params.validate()?;
    partition.validate()?;
    for &(name, value) in widths {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositive { name, value });
        }
    }
    Ok(Inputs {
        k0: propagator::k0_for(params)?,
        g: propagator::coupling_g(&params.coupling, params.omega, params.duration)?,
        delta: partition.width,
    })
}

/// |D(c_α, c_α+1)| ≤ |K_0|²|A|²σ³·[I(β) − κ²σ²·J(β)] for a narrow particle.
pub fn narrow_particle_bound(
    params: &OscillatorParams,
    partition: &Partition,
    sigma: f64,
    ell: f64,
    normalization: Normalization,
) -> Result<ExpansionBound> {
    let inp = inputs(params, partition, &[("sigma", sigma), ("ell", ell)])?;
    let k2s2 = (model::kappa(inp.g, ell) * sigma).powi(2);
    let pref = inp.k0 * normalization.amplitude_sq(sigma) * sigma.powi(3);
    let f = particle_factors(inp.delta / sigma);
    Ok(ExpansionBound::new(pref * f.i, -k2s2 * pref * f.j, k2s2))
}

/// The β → ∞ form √(π/2)|K_0|²|A|²σ³(1 − 2κ²σ²).
pub fn narrow_particle_asymptotic(
    params: &OscillatorParams,
    partition: &Partition,
    sigma: f64,
    ell: f64,
    normalization: Normalization,
) -> Result<f64> {
    let inp = inputs(params, partition, &[("sigma", sigma), ("ell", ell)])?;
    let k2s2 = (model::kappa(inp.g, ell) * sigma).powi(2);
    Ok(SQRT_HALF_PI * inp.k0 * normalization.amplitude_sq(sigma) * sigma.powi(3) * (1.0 - 2.0 * k2s2))
}

/// p_α ≲ |K_0|²|A|²σ³·[P₀(β) − κ²σ²·P₁(β)] for a narrow particle.
pub fn narrow_particle_probability(
    params: &OscillatorParams,
    partition: &Partition,
    sigma: f64,
    ell: f64,
    normalization: Normalization,
) -> Result<ExpansionBound> {
    let inp = inputs(params, partition, &[("sigma", sigma), ("ell", ell)])?;
    let k2s2 = (model::kappa(inp.g, ell) * sigma).powi(2);
    let pref = inp.k0 * normalization.amplitude_sq(sigma) * sigma.powi(3);
    let k = probability_kernels(inp.delta / sigma);
    Ok(ExpansionBound::new(pref * k.p0, -k2s2 * pref * k.p1, k2s2))
}

/// The β → ∞ form 2π|K_0|²|A|²σ²δ·(1 − g²σ²/(8ℓ²)).
pub fn narrow_particle_probability_asymptotic(
    params: &OscillatorParams,
    partition: &Partition,
    sigma: f64,
    ell: f64,
    normalization: Normalization,
) -> Result<f64> {
    let inp = inputs(params, partition, &[("sigma", sigma), ("ell", ell)])?;
    let k2s2 = (model::kappa(inp.g, ell) * sigma).powi(2);
    Ok(2.0 * PI * inp.k0 * normalization.amplitude_sq(sigma) * sigma * sigma * inp.delta * (1.0 - k2s2))
}

/// Ratio ℓ/δ above which the narrow-pointer expansion is flagged.
pub const NARROW_POINTER_MAX_RATIO: f64 = 0.1;
/// γ below which the step-function approximation for probabilities is flagged.
pub const NARROW_POINTER_MIN_GAMMA: f64 = 1.5;

/// |D(c_α, c_α+1)| ≤ √(π/2)|K_0|²|A|²·[σF(γ)/κ² − G(γ)/(κ⁴σ)] for a narrow pointer.
pub fn narrow_pointer_bound(
    params: &OscillatorParams,
    partition: &Partition,
    sigma: f64,
    ell: f64,
    normalization: Normalization,
) -> Result<ExpansionBound> {
    let inp = inputs(params, partition, &[("sigma", sigma), ("ell", ell)])?;
    if inp.g == 0.0 {
        return Err(Error::DecoupledApparatus);
    }
    let kappa = model::kappa(inp.g, ell);
    let pref = SQRT_HALF_PI * inp.k0 * normalization.amplitude_sq(sigma);
    let f = pointer_factors(kappa * inp.delta);
    let ratio = 16.0 * ell * ell / (3.0 * inp.g * inp.g * sigma * sigma);
    let mut bound =
        ExpansionBound::new(pref * sigma / (kappa * kappa) * f.f, -pref / (kappa.powi(4) * sigma) * f.g, ratio);
    if ell / inp.delta >= NARROW_POINTER_MAX_RATIO {
        bound.warning = Some("pointer not narrow: ell/delta >= 0.1");
    }
    Ok(bound)
}

/// The γ → ∞ form for a normalized particle: |K_0|²(4ℓ²/g²)(1 − 16ℓ²/(3g²σ²)).
pub fn narrow_pointer_asymptotic(params: &OscillatorParams, sigma: f64, ell: f64) -> Result<f64> {
    let lead = narrow_pointer_leading_order(params, ell)?;
    let g = propagator::coupling_g(&params.coupling, params.omega, params.duration)?;
    Ok(lead * (1.0 - 16.0 * ell * ell / (3.0 * g * g * sigma * sigma)))
}

/// D⁽⁰⁾ = 2mωℓ²/(πg² sin ωT) = 4ℓ²|K_0|²/g².
pub fn narrow_pointer_leading_order(params: &OscillatorParams, ell: f64) -> Result<f64> {
    params.validate()?;
    let g = propagator::coupling_g(&params.coupling, params.omega, params.duration)?;
    if g == 0.0 {
        return Err(Error::DecoupledApparatus);
    }
    Ok(4.0 * ell * ell * propagator::k0_for(params)? / (g * g))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxProbability {
    pub value: f64,
    pub gamma: f64,
    /// γ > 1.5, where the step-function approximation holds.
    pub valid: bool,
}

/// Lowest-order probability for a narrow Gaussian pointer:
/// (4/g)|K_0|²·δ·πℓ²|B|², i.e. (4/g)|K_0|²√(2π)ℓδ for a normalized pointer
/// and exactly the sharp-pointer value (4/g)|K_0|²δ in the delta limit.
pub fn narrow_pointer_probability(
    params: &OscillatorParams,
    partition: &Partition,
    ell: f64,
    pointer_normalization: Normalization,
) -> Result<ApproxProbability> {
    let inp = inputs(params, partition, &[("ell", ell)])?;
    if inp.g == 0.0 {
        return Err(Error::DecoupledApparatus);
    }
    let shape = match pointer_normalization {
        Normalization::DeltaLimit => 1.0,
        Normalization::L2Normalized => SQRT_2PI * ell,
    };
    let gamma = model::kappa(inp.g, ell) * inp.delta;
    Ok(ApproxProbability {
        value: 4.0 * inp.delta * inp.k0 / inp.g.abs() * shape,
        gamma,
        valid: gamma > NARROW_POINTER_MIN_GAMMA,
    })
}
