//! Initial states that decohere exactly: a sharp particle position (coupled
//! or uncoupled) and a sharp pointer position.
//!
//! In each case the decoherence functional contains the product
//! e_Δα′(x̄)·e_Δα(x̄) at a single argument, which vanishes for α ≠ α′. The
//! diagonal values are relative probabilities: the states are not
//! normalizable and the probabilities sum to infinity.

use crate::error::{Error, Result};
use crate::model::{Configuration, FunctionalResult, InitialState, OscillatorParams, Partition};
use crate::propagator;

/// A diagonal value of the functional for a non-normalizable state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeProbability {
    pub alpha: i64,
    pub value: f64,
    /// Always true here: ratios are meaningful, the total diverges.
    pub relative: bool,
}

fn diagonal_or_zero(alpha: i64, alpha_prime: i64, diagonal: impl FnOnce() -> Result<f64>) -> Result<FunctionalResult> {
    if alpha != alpha_prime {
        return Ok(FunctionalResult::exact(0.0));
    }
    diagonal().map(FunctionalResult::exact)
}

fn checked(params: &OscillatorParams, partition: &Partition) -> Result<()> {
    params.validate()?;
    partition.validate()
}

/// p_α = 2δ|K_0|² = mωδ/(π sin ωT), for every α and every x₀.
pub fn sharp_particle_probability(params: &OscillatorParams, partition: &Partition) -> Result<f64> {
    checked(params, partition)?;
    Ok(2.0 * partition.width * propagator::k0_for(params)?)
}

/// D(c_α, c_α′) for ψ₀ = δ(x − x₀) and any normalized pointer. Neither x₀,
/// the pointer shape nor the driving force enters.
pub fn sharp_particle_functional(
    alpha: i64,
    alpha_prime: i64,
    params: &OscillatorParams,
    partition: &Partition,
) -> Result<FunctionalResult> {
    checked(params, partition)?;
    diagonal_or_zero(alpha, alpha_prime, || sharp_particle_probability(params, partition))
}

/// Same as [`sharp_particle_functional`] with the pointer removed
/// (Δ_overlap ≡ 1): decoherence does not need the apparatus.
pub fn uncoupled_particle_functional(
    alpha: i64,
    alpha_prime: i64,
    params: &OscillatorParams,
    partition: &Partition,
) -> Result<FunctionalResult> {
    sharp_particle_functional(alpha, alpha_prime, params, partition)
}

/// p_α = (4δ/g)|K_0|² = 2mωδ/(gπ sin ωT) for a pointer prepared at X = 0.
///
/// The overlap of a delta-function pointer with its shifted copy is
/// (2/|g|)·δ(x″ − x′), so the magnitude of g is what enters.
pub fn sharp_pointer_probability(params: &OscillatorParams, partition: &Partition) -> Result<f64> {
    checked(params, partition)?;
    let g = propagator::coupling_g(&params.coupling, params.omega, params.duration)?;
    if g == 0.0 {
        return Err(Error::DecoupledApparatus);
    }
    Ok(4.0 * partition.width * propagator::k0_for(params)? / g.abs())
}

/// D(c_α, c_α′) for Φ₀ = δ(X) and any normalized particle state.
pub fn sharp_pointer_functional(
    alpha: i64,
    alpha_prime: i64,
    params: &OscillatorParams,
    partition: &Partition,
) -> Result<FunctionalResult> {
    // g = 0 is reported even off the diagonal: the functional is undefined there
    let p = sharp_pointer_probability(params, partition)?;
    diagonal_or_zero(alpha, alpha_prime, || Ok(p))
}

/// D(c_α, c_α′) for a configuration whose state decoheres exactly.
/// Gaussian ⊗ Gaussian states are rejected: they only decohere approximately.
pub fn functional(alpha: i64, alpha_prime: i64, config: &Configuration) -> Result<FunctionalResult> {
    let (params, partition) = (&config.params, &config.partition);
    match config.state {
        InitialState::SharpParticle { .. } => sharp_particle_functional(alpha, alpha_prime, params, partition),
        InitialState::SharpPointer { .. } => sharp_pointer_functional(alpha, alpha_prime, params, partition),
        InitialState::Product { .. } => Err(Error::config("a Gaussian product state does not decohere exactly")),
    }
}

/// The constant relative probabilities for α ∈ [−n, n].
pub fn relative_probabilities(value: f64, window: u32) -> Vec<RelativeProbability> {
    let n = window as i64;
    (-n..=n).map(|alpha| RelativeProbability { alpha, value, relative: true }).collect()
}

/// Σ_{|α| ≤ n} p_α. Grows as (2n + 1)·p without bound.
pub fn partial_probability_sum(value: f64, window: u32) -> f64 {
    relative_probabilities(value, window).iter().map(|p| p.value).sum()
}
