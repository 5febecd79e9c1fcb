//! Decoherence functionals, decoherence bounds and coarse-grained history
//! probabilities for a driven harmonic oscillator measured by a von Neumann
//! pointer.
//!
//! Closed forms live in [`exact_decoherence`] and [`gaussian_analysis`];
//! [`oracle`] re-derives them by direct quadrature.

pub mod coarse_grain;
pub mod config;
pub mod error;
pub mod exact_decoherence;
pub mod gaussian_analysis;
pub mod model;
pub mod oracle;
pub mod propagator;
pub mod quadrature;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use gaussian_analysis::{ExpansionBound, FactorKind, JForm};
pub use model::{
    Configuration, FunctionalResult, GaussianSpec, InitialState, Normalization, OscillatorParams, Partition,
    TimeProfile,
};
pub use quadrature::QuadratureSpec;
