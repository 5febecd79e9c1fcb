//! Physical parameters, initial states and configuration validation.
//!
//! Units have ħ = 1. Lengths (δ, σ, ℓ, x₀) share one arbitrary unit; the
//! coupling function f(t) is dimensionless and the driving force f_D(t)
//! carries force units.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::propagator;
use crate::special::{SQRT_2_OVER_PI, SQRT_HALF_PI};

/// Guard on `ωT mod π`: closer than this to a nonzero multiple of π the
/// propagator is treated as singular.
pub const EPS_SING: f64 = 1e-6;
/// Uniform grid used to check that f and f_D are symmetric about T/2.
pub const SYMMETRY_GRID_POINTS: usize = 257;
/// Relative tolerance of the symmetry check, in units of max|f| on the grid.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A real function of time on [0, T]: the coupling f(t) or the driving force f_D(t).
#[derive(Clone)]
pub enum TimeProfile {
    Const(f64),
    /// `a · sin(πt/T)`: vanishes at both ends, symmetric about T/2.
    SineWindow(f64),
    /// Piecewise-linear interpolation of sampled `(t, value)` pairs, clamped
    /// to the end values outside the sampled range.
    Table(Arc<[(f64, f64)]>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl TimeProfile {
    pub fn zero() -> Self {
        TimeProfile::Const(0.0)
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TimeProfile::Custom(Arc::new(f))
    }

    /// Parses `const[:c]`, `sine-window[:a]` or `table:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec, None),
        };
        let number = |arg: Option<&str>| -> Result<f64> {
            match arg {
                None => Ok(1.0),
                Some(a) => {
                    a.parse::<f64>().map_err(|_| Error::config(format!("bad amplitude '{a}' in profile '{spec}'")))
                }
            }
        };
        match name {
            "const" => Ok(TimeProfile::Const(number(arg)?)),
            "sine-window" => Ok(TimeProfile::SineWindow(number(arg)?)),
            "table" => {
                let path = arg.ok_or_else(|| Error::config("table profile needs a path: table:<path>"))?;
                Self::from_table_file(path)
            }
            _ => Err(Error::config(format!("unknown profile '{spec}' (expected const, sine-window or table:<path>)"))),
        }
    }

    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read table {}: {e}", path.display())))?;
        Self::from_table_str(&text)
    }

    /// Two-column CSV `(t, value)`. Blank lines, `#` comments and a single
    /// non-numeric header line are skipped.
    pub fn from_table_str(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(t), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::config(format!("table line {}: expected two columns", lineno + 1)));
            };
            match (t.parse::<f64>(), v.parse::<f64>()) {
                (Ok(t), Ok(v)) => rows.push((t, v)),
                _ if rows.is_empty() && lineno == 0 => continue,
                _ => return Err(Error::config(format!("table line {}: not numeric", lineno + 1))),
            }
        }
        if rows.len() < 2 {
            return Err(Error::config("table needs at least two rows"));
        }
        if rows.windows(2).any(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::config("table times must be strictly increasing"));
        }
        Ok(TimeProfile::Table(rows.into()))
    }

    pub fn eval(&self, t: f64, duration: f64) -> f64 {
        match self {
            TimeProfile::Const(c) => *c,
            TimeProfile::SineWindow(a) => a * (PI * t / duration).sin(),
            TimeProfile::Table(rows) => interpolate(rows, t),
            TimeProfile::Custom(f) => f(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TimeProfile::Const(c) | TimeProfile::SineWindow(c) => *c == 0.0,
            TimeProfile::Table(rows) => rows.iter().all(|&(_, v)| v == 0.0),
            TimeProfile::Custom(_) => false,
        }
    }

    /// Checks `|f(t) − f(T−t)| ≤ SYMMETRY_TOL · max|f|` on the validation grid.
    pub fn check_symmetric(&self, name: &str, duration: f64) -> Result<()> {
        let n = SYMMETRY_GRID_POINTS - 1;
        let ts: Vec<f64> = (0..=n).map(|i| duration * i as f64 / n as f64).collect();
        let scale = ts.iter().map(|&t| self.eval(t, duration).abs()).fold(0.0, f64::max);
        for &t in &ts {
            let deviation = (self.eval(t, duration) - self.eval(duration - t, duration)).abs();
            if deviation > SYMMETRY_TOL * scale || deviation.is_nan() {
                return Err(Error::AsymmetricFunction { name: name.to_string(), at: t, deviation });
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeProfile::Const(c) => write!(f, "Const({c})"),
            TimeProfile::SineWindow(a) => write!(f, "SineWindow({a})"),
            TimeProfile::Table(rows) => write!(f, "Table({} rows)", rows.len()),
            TimeProfile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

fn interpolate(rows: &[(f64, f64)], t: f64) -> f64 {
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let i = rows.partition_point(|&(ti, _)| ti <= t);
    let (t0, v0) = rows[i - 1];
    let (t1, v1) = rows[i];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Oscillator, measurement and driving parameters.
#[derive(Debug, Clone)]
pub struct OscillatorParams {
    pub mass: f64,
    pub omega: f64,
    /// Measurement duration T.
    pub duration: f64,
    pub coupling: TimeProfile,
    pub driving: TimeProfile,
    /// Pointer displacement d(ω, T). Cancels from every implemented quantity.
    pub displacement: f64,
    /// Effective pointer mass. Cancels from every implemented quantity.
    pub effective_mass: f64,
    /// Permit `sin ωT < 0`, using `|sin ωT|` in `|K_0|²`.
    pub allow_caustic_branch: bool,
}

impl OscillatorParams {
    /// Constant unit coupling, no driving force.
    pub fn new(mass: f64, omega: f64, duration: f64) -> Self {
        Self {
            mass,
            omega,
            duration,
            coupling: TimeProfile::Const(1.0),
            driving: TimeProfile::zero(),
            displacement: 0.0,
            effective_mass: 1.0,
            allow_caustic_branch: false,
        }
    }

    pub fn with_coupling(mut self, coupling: TimeProfile) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_driving(mut self, driving: TimeProfile) -> Self {
        self.driving = driving;
        self
    }

    pub fn omega_t(&self) -> f64 {
        self.omega * self.duration
    }

    pub fn validate(&self) -> Result<()> {
        positive("m", self.mass)?;
        positive("T", self.duration)?;
        positive("effective_mass", self.effective_mass)?;
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::config(format!("omega must be finite and >= 0, got {}", self.omega)));
        }
        if !self.displacement.is_finite() {
            return Err(Error::config("displacement must be finite"));
        }
        propagator::sin_omega_t(self.omega, self.duration, self.allow_caustic_branch)?;
        self.coupling.check_symmetric("coupling f", self.duration)?;
        self.driving.check_symmetric("driving force f_D", self.duration)?;
        Ok(())
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Equal-length intervals Δ_α = (x̄_α − δ/2, x̄_α + δ/2] with x̄_α = origin + αδ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition {
    pub width: f64,
    pub origin: f64,
}

impl Partition {
    pub fn new(width: f64, origin: f64) -> Self {
        Self { width, origin }
    }

    pub fn validate(&self) -> Result<()> {
        positive("delta", self.width)?;
        if !self.origin.is_finite() {
            return Err(Error::config("partition origin must be finite"));
        }
        Ok(())
    }

    /// Center x̄_α of interval α.
    pub fn center(&self, alpha: i64) -> f64 {
        self.origin + alpha as f64 * self.width
    }
}

/// Amplitude convention of a Gaussian `A·exp(−(x−c)²/w²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Unit L² norm: |A|² = √(2/π)/w.
    L2Normalized,
    /// Tends to a delta function as w → 0: |A|² = 1/(πw²).
    DeltaLimit,
}

impl Normalization {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "l2" | "L2" | "l2-normalized" | "L2Normalized" => Ok(Normalization::L2Normalized),
            "delta" | "delta-limit" | "DeltaLimit" => Ok(Normalization::DeltaLimit),
            other => Err(Error::config(format!("unknown normalization '{other}' (expected l2 or delta)"))),
        }
    }

    pub fn amplitude_sq(self, halfwidth: f64) -> f64 {
        match self {
            Normalization::L2Normalized => SQRT_2_OVER_PI / halfwidth,
            Normalization::DeltaLimit => 1.0 / (PI * halfwidth * halfwidth),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center: f64,
    pub halfwidth: f64,
    pub normalization: Normalization,
}

impl GaussianSpec {
    pub fn new(center: f64, halfwidth: f64, normalization: Normalization) -> Self {
        Self { center, halfwidth, normalization }
    }

    pub fn amplitude_sq(&self) -> f64 {
        self.normalization.amplitude_sq(self.halfwidth)
    }

    /// ∫|ψ|² = |A|²·w·√(π/2); exactly 1 for the L² convention.
    pub fn norm_sq(&self) -> f64 {
        match self.normalization {
            Normalization::L2Normalized => 1.0,
            Normalization::DeltaLimit => self.amplitude_sq() * self.halfwidth * SQRT_HALF_PI,
        }
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        positive(name, self.halfwidth)?;
        if !self.center.is_finite() {
            return Err(Error::config(format!("{name}: center must be finite")));
        }
        Ok(())
    }
}

/// Product initial states of particle ⊗ pointer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Particle in the position eigenstate x₀, any normalized pointer.
    SharpParticle {
        x0: f64,
        pointer: GaussianSpec,
    },
    /// Pointer in the position eigenstate X = 0, any normalized particle.
    SharpPointer {
        particle: GaussianSpec,
    },
    Product {
        particle: GaussianSpec,
        pointer: GaussianSpec,
    },
}

impl InitialState {
    pub fn particle(&self) -> Option<&GaussianSpec> {
        match self {
            InitialState::SharpParticle { .. } => None,
            InitialState::SharpPointer { particle } | InitialState::Product { particle, .. } => Some(particle),
        }
    }

    pub fn pointer(&self) -> Option<&GaussianSpec> {
        match self {
            InitialState::SharpPointer { .. } => None,
            InitialState::SharpParticle { pointer, .. } | InitialState::Product { pointer, .. } => Some(pointer),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let InitialState::SharpParticle { x0, .. } = self {
            if !x0.is_finite() {
                return Err(Error::config("x0 must be finite"));
            }
        }
        if let Some(p) = self.particle() {
            p.validate("sigma")?;
        }
        if let Some(p) = self.pointer() {
            p.validate("ell")?;
        }
        Ok(())
    }
}

/// A parameter set whose invariants have been checked.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub params: OscillatorParams,
    pub partition: Partition,
    pub state: InitialState,
}

/// Returns the configuration unchanged if every invariant holds.
pub fn validate(params: OscillatorParams, partition: Partition, state: InitialState) -> Result<Configuration> {
    params.validate()?;
    partition.validate()?;
    state.validate()?;
    Ok(Configuration { params, partition, state })
}

impl Configuration {
    pub fn validate(self) -> Result<Self> {
        validate(self.params, self.partition, self.state)
    }
}

/// Coupling and driving constants plus the dimensionless groups.
///
/// Groups that need a width the state does not have (σ for a sharp
/// particle, ℓ for a sharp pointer) are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub b: f64,
    pub g: f64,
    pub a_d: f64,
    pub b_d: f64,
    pub d: f64,
    /// κ = g/(√8·ℓ)
    pub kappa: Option<f64>,
    /// β = δ/σ
    pub beta: Option<f64>,
    /// γ = κδ
    pub gamma: Option<f64>,
    /// λ = κσ
    pub lambda: Option<f64>,
}

pub fn kappa(g: f64, ell: f64) -> f64 {
    g.abs() / (8f64.sqrt() * ell)
}

pub fn dimensionless_groups(config: &Configuration) -> Result<DerivedConstants> {
    let p = &config.params;
    let b = propagator::coupling_b(&p.coupling, p.omega, p.duration)?;
    let g = propagator::coupling_g(&p.coupling, p.omega, p.duration)?;
    let (a_d, b_d) = propagator::driving_integrals(&p.driving, p.omega, p.duration)?;
    let delta = config.partition.width;
    let sigma = config.state.particle().map(|s| s.halfwidth);
    let kappa = config.state.pointer().map(|s| kappa(g, s.halfwidth));
    Ok(DerivedConstants {
        b,
        g,
        a_d,
        b_d,
        d: p.displacement,
        kappa,
        beta: sigma.map(|s| delta / s),
        gamma: kappa.map(|k| k * delta),
        lambda: kappa.zip(sigma).map(|(k, s)| k * s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultKind {
    ExactValue,
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Oracle,
}

/// Value or bound of D(c_α, c_α′), split into expansion orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalResult {
    pub kind: ResultKind,
    pub order0: f64,
    pub order1: f64,
    pub total: f64,
    pub method: Method,
    /// Zero for closed forms.
    pub estimated_error: f64,
}

impl FunctionalResult {
    pub fn exact(value: f64) -> Self {
        Self {
            kind: ResultKind::ExactValue,
            order0: value,
            order1: 0.0,
            total: value,
            method: Method::ClosedForm,
            estimated_error: 0.0,
        }
    }
}
