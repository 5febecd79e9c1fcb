use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `sin(ωT)` vanishes (to within the singularity guard), so `|K_0|²` diverges.
    #[error("propagator is singular: omega*T = {omega_t} is within {eps} of a multiple of pi")]
    SingularPropagator { omega_t: f64, eps: f64 },

    #[error("sin(omega*T) < 0 (omega*T = {omega_t}); enable the caustic branch to use |sin(omega*T)|")]
    NegativeDensity { omega_t: f64 },

    #[error("{name} is not symmetric about T/2: |f(t) - f(T-t)| = {deviation:e} at t = {at}")]
    AsymmetricFunction { name: String, at: f64, deviation: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("coupling constant g vanishes: the pointer is decoupled from the particle")]
    DecoupledApparatus,

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
