//! Flat `key = value` configuration with `#` comments.
//!
//! Recognised keys (all optional):
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `mass`, `omega`, `duration` | oscillator | 1, 1, π/2 |
//! | `coupling`, `driving` | profiles (`const[:c]`, `sine-window[:a]`, `table:<path>`, `zero`) | `const:1`, `zero` |
//! | `displacement`, `effective_mass` | pointer constants | 0, 1 |
//! | `allow_caustic_branch` | use \|sin ωT\| past ωT = π | false |
//! | `delta`, `origin` | partition | 0.1, 0 |
//! | `state` | `sharp-particle`, `sharp-pointer`, `product` | `product` |
//! | `x0` | sharp particle position | 0 |
//! | `sigma`, `particle_center`, `particle_norm` | particle Gaussian | δ/5, 0, `l2` |
//! | `ell`, `pointer_norm` | pointer Gaussian | δ/20, `l2` |
//! | `rel_tol`, `abs_tol`, `max_depth`, `tail_cut` | quadrature | see [`QuadratureSpec`] |
//!
//! Keys not listed here are kept and may be read by front ends.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    self, Configuration, GaussianSpec, InitialState, Normalization, OscillatorParams, Partition, TimeProfile,
};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value, got '{line}'", n + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::config(format!("line {}: empty key", n + 1)));
            }
            map.set(key, value.trim());
        }
        Ok(map)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::config(format!("expected key=value, got '{pair}'")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.replace('-', "_"), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, v),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(Error::config(format!("{key}: expected a boolean, got '{v}'"))),
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let d = QuadratureSpec::default();
        let max_depth = match self.get("max_depth") {
            None => d.max_depth,
            Some(v) => v.parse().map_err(|_| Error::config(format!("max_depth: expected an integer, got '{v}'")))?,
        };
        let spec = QuadratureSpec {
            rel_tol: self.f64_or("rel_tol", d.rel_tol)?,
            abs_tol: self.f64_or("abs_tol", d.abs_tol)?,
            max_depth,
            tail_cut: self.f64_or("tail_cut", d.tail_cut)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn profile(&self, key: &str, default: TimeProfile) -> Result<TimeProfile> {
        match self.get(key) {
            None => Ok(default),
            Some("zero" | "none") => Ok(TimeProfile::zero()),
            Some(v) => TimeProfile::parse(v),
        }
    }

    fn normalization(&self, key: &str) -> Result<Normalization> {
        self.get(key).map_or(Ok(Normalization::L2Normalized), Normalization::parse)
    }

    /// Builds and validates the physical configuration.
    pub fn configuration(&self) -> Result<Configuration> {
        let mut params = OscillatorParams::new(
            self.f64_or("mass", 1.0)?,
            self.f64_or("omega", 1.0)?,
            self.f64_or("duration", PI / 2.0)?,
        );
        params.coupling = self.profile("coupling", TimeProfile::Const(1.0))?;
        params.driving = self.profile("driving", TimeProfile::zero())?;
        params.displacement = self.f64_or("displacement", 0.0)?;
        params.effective_mass = self.f64_or("effective_mass", params.effective_mass)?;
        params.allow_caustic_branch = self.bool_or("allow_caustic_branch", false)?;

        let delta = self.f64_or("delta", 0.1)?;
        let partition = Partition::new(delta, self.f64_or("origin", 0.0)?);
        let particle = GaussianSpec::new(
            self.f64_or("particle_center", 0.0)?,
            self.f64_or("sigma", delta / 5.0)?,
            self.normalization("particle_norm")?,
        );
        let pointer = GaussianSpec::new(0.0, self.f64_or("ell", delta / 20.0)?, self.normalization("pointer_norm")?);
        let state = match self.get("state").unwrap_or("product") {
            "sharp-particle" | "sharp_particle" => InitialState::SharpParticle { x0: self.f64_or("x0", 0.0)?, pointer },
            "sharp-pointer" | "sharp_pointer" => InitialState::SharpPointer { particle },
            "product" => InitialState::Product { particle, pointer },
            other => return Err(Error::config(format!("unknown state '{other}'"))),
        };
        model::validate(params, partition, state)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x = match v {
        "pi" => PI,
        _ if v.starts_with("pi/") => PI / parse_f64(key, &v[3..])?,
        _ => v.parse::<f64>().map_err(|_| Error::config(format!("{key}: expected a number, got '{v}'")))?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::config(format!("{key}: value must be finite")))
    }
}
